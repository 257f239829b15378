"""Formal power-series inversion of Keller maps and exact inverse checks."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DimensionError, PreconditionError
from .polymap import PolyMap, compose, is_keller, p_degree
from .reduction import normalize_keller
from .scalars import GaussianRational

__all__ = ["InverseResult", "formal_inverse", "verify_inverse", "invert_keller", "default_cap",
           "InverseCheck"]


def default_cap(F: PolyMap) -> int:
    """deg_p(F)^(n-1) + 1, the classical bound on the inverse degree plus one."""
    return max(p_degree(F), 1) ** max(F.dim - 1, 0) + 1


@dataclass
class InverseResult:
    inverse: PolyMap | None
    cap: int
    degree_reached: int

    @property
    def converged(self) -> bool:
        return self.inverse is not None

    def __bool__(self):
        return self.converged


@dataclass(frozen=True)
class InverseCheck:
    passed: bool
    left: bool    # F o G == Id
    right: bool   # G o F == Id

    def __bool__(self):
        return self.passed


def verify_inverse(F: PolyMap, G: PolyMap) -> InverseCheck:
    if F.dim != G.dim:
        raise DimensionError(f"maps of dimension {F.dim} and {G.dim}")
    G = G.relabel(F.ring)
    ident = PolyMap.identity(F.ring)
    left = compose(F, G) == ident
    right = compose(G, F) == ident
    return InverseCheck(left and right, left, right)


def _check_unipotent_form(F: PolyMap):
    ident = PolyMap.identity(F.ring)
    if any(not p.constant_term().is_zero() for p in F.components):
        raise PreconditionError("F has constant terms; expected F = Id - H with H of order >= 2")
    if F.homogeneous_part(1) != ident:
        raise PreconditionError("linear part of F is not the identity")


def formal_inverse(F: PolyMap, degree_cap: int | None = None) -> InverseResult:
    """Invert F = Id - H (H of order >= 2, Keller constant 1) as a power series.

    The fixed-point iteration G <- Id + H o G is run degree by degree: after
    the pass at degree k, G agrees with the formal inverse up to degree k.
    Whenever a pass adds no new terms, the candidate is checked exactly with
    F o G = Id.  Reaching the cap without success is reported, never read as
    non-invertibility.
    """
    _check_unipotent_form(F)
    keller = is_keller(F)
    if not keller or keller.constant != 1:
        raise PreconditionError("F must be a Keller map with Jacobian determinant 1")
    cap = default_cap(F) if degree_cap is None else degree_cap
    ident = PolyMap.identity(F.ring)
    H = ident - F
    G = ident
    if H.components and all(p.is_zero() for p in H.components):
        return InverseResult(ident, cap, 1)
    probe = _probe_point(F.dim)
    for k in range(2, cap + 1):
        step = compose(H, G, max_degree=k)
        new_G = ident + step
        fresh = new_G.homogeneous_part(k)
        G = new_G
        if all(p.is_zero() for p in fresh.components) and _is_inverse(F, G, probe):
            return InverseResult(G, cap, k)
    if _is_inverse(F, G, probe):
        return InverseResult(G, cap, cap)
    return InverseResult(None, cap, cap)


def _probe_point(n):
    return [GaussianRational(Fraction(j + 2, 2 * j + 3), Fraction(1, j + 5)) for j in range(n)]


def _is_inverse(F: PolyMap, G: PolyMap, probe) -> bool:
    # one exact evaluation rules out most candidates before the costly symbolic check
    if list(F.evaluate(G.evaluate(probe))) != probe:
        return False
    return compose(F, G) == PolyMap.identity(F.ring)


def invert_keller(F: PolyMap, degree_cap: int | None = None) -> InverseResult:
    """Invert a general Keller map: normalize at the origin, invert, undo the normalization."""
    F_norm, w = normalize_keller(F)
    cap = default_cap(F) if degree_cap is None else degree_cap
    res = formal_inverse(F_norm, cap)
    if not res:
        return res
    # R o F_norm = F o H  =>  F^-1 = H o F_norm^-1 o R^-1
    ring = F.ring
    inv = compose(compose(w.H.as_polymap(ring), res.inverse), w.R.inverse().as_polymap(ring))
    return InverseResult(inv, cap, res.degree_reached)
