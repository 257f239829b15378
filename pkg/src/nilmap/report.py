"""JSON run reports with a determinism digest."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from gmpy2 import mpq

from .automorphisms import Automorphism, EquivalenceWitness
from .polymap import PolyMap
from .polynomial import Polynomial
from .scalars import ExtensionScalar, GaussianRational, format_coefficient

SCHEMA_VERSION = 1

__all__ = ["RunReport", "jsonable", "text_digest", "SCHEMA_VERSION"]


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _float(v: float) -> float:
    # 12 significant digits keeps reports stable against last-bit noise
    return float(f"{v:.12g}")


def jsonable(obj: Any) -> Any:
    """Convert library values to plain JSON types (exact values become strings)."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, complex):
        return [_float(obj.real), _float(obj.imag)]
    if isinstance(obj, GaussianRational):
        return format_coefficient(obj)
    if isinstance(obj, (Fraction, type(mpq()))):
        return str(obj)
    if isinstance(obj, Polynomial):
        return obj.to_text()
    if isinstance(obj, PolyMap):
        return {"vars": list(obj.ring), "eqs": [p.to_text() for p in obj.components]}
    if isinstance(obj, ExtensionScalar):
        return {"d": obj.d, "c": format_coefficient(obj.c), "coords": [jsonable(a) for a in obj.coords]}
    if isinstance(obj, (Automorphism, EquivalenceWitness)):
        return obj.to_record()
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):  # enums
        return obj.value
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass
class RunReport:
    command: str
    seed: int | None = None
    inputs: dict[str, str] = field(default_factory=dict)     # label -> sha256 of canonical text
    verdicts: dict[str, Any] = field(default_factory=dict)
    witnesses: list[Any] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    parameters: dict[str, Any] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    def add_input(self, label: str, canonical_text: str):
        self.inputs[label] = text_digest(canonical_text)

    def _body(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "seed": self.seed,
            "parameters": jsonable(self.parameters),
            "inputs": dict(self.inputs),
            "verdicts": jsonable(self.verdicts),
            "witnesses": jsonable(self.witnesses),
            "events": jsonable(self.events),
        }

    def determinism_digest(self) -> str:
        """sha256 over everything except timings."""
        return text_digest(json.dumps(self._body(), sort_keys=True, separators=(",", ":")))

    def to_dict(self) -> dict:
        out = self._body()
        out["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        out["digest"] = self.determinism_digest()
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def write(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
