"""The ``.pmap`` text format: a small line-oriented language for polynomial maps.

::

    # comments run to end of line
    name  optional free text
    ring  QI                    (optional; the only coefficient field)
    vars  x y
    eq    x + y^2
    eq    y

Expressions use ``+ - * / ^`` and parentheses.  Literals are non-negative
integers and the imaginary unit ``i``; ``/`` divides by a nonzero constant,
which is how ``a/b`` coefficients are written.  Juxtaposition (``2x``) is an
error.  A ``raw`` line lifts the one-equation-per-variable requirement.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ParseError
from .polymap import PolyMap
from .polynomial import Polynomial
from .scalars import GaussianRational

__all__ = ["PmapDocument", "parse_pmap", "print_pmap", "parse_polynomial", "document_from_map",
           "RING_MARKER"]

RING_MARKER = "QI"
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()])|(?P<bad>\S))")
_KEYWORDS = ("name", "ring", "vars", "raw", "eq")


@dataclass
class PmapDocument:
    variables: tuple[str, ...]
    equations: list[Polynomial]
    name: str | None = None
    ring_marker: str | None = None
    raw: bool = False
    lines: list[int] = field(default_factory=list, compare=False, repr=False)

    def to_polymap(self) -> PolyMap:
        if self.raw:
            raise ParseError("a raw polynomial list is not a map")
        return PolyMap(self.equations, self.variables)

    def __str__(self):
        return print_pmap(self)


def document_from_map(F: PolyMap, name: str | None = None) -> PmapDocument:
    return PmapDocument(tuple(F.ring), list(F.components), name=name)


# ----------------------------------------------------------------- lexing

@dataclass(frozen=True)
class _Tok:
    kind: str   # num | name | op | end
    text: str
    col: int    # 1-based


def _lex(text: str, line: int | None, col0: int):
    toks = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        kind = m.lastgroup
        start = m.start(kind)
        if kind == "bad":
            raise ParseError(f"unexpected character {m.group(kind)!r}", line, col0 + start)
        toks.append(_Tok(kind, m.group(kind), col0 + start))
        pos = m.end()
    toks.append(_Tok("end", "", col0 + len(text.rstrip())))
    return toks


# ---------------------------------------------------------------- parsing

class _Parser:
    def __init__(self, toks, ring, line):
        self.toks = toks
        self.k = 0
        self.ring = tuple(ring)
        self.index = {v: j for j, v in enumerate(self.ring)}
        self.line = line

    def peek(self) -> _Tok:
        return self.toks[self.k]

    def take(self) -> _Tok:
        t = self.toks[self.k]
        self.k += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok.col)

    def expect_end(self):
        t = self.peek()
        if t.kind != "end":
            if t.kind in ("num", "name") or t.text == "(":
                self.fail("implicit multiplication is not allowed; use '*'")
            self.fail(f"unexpected {t.text!r}")

    def expr(self) -> Polynomial:
        acc = self.term()
        while self.peek().text in ("+", "-") and self.peek().kind == "op":
            op = self.take().text
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> Polynomial:
        acc = self.unary()
        while self.peek().kind == "op" and self.peek().text in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op.text == "*":
                acc = acc * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    self.fail("division is only allowed by a nonzero constant", op)
                acc = acc.scale(rhs.as_constant().inverse())
        return acc

    def unary(self) -> Polynomial:
        t = self.peek()
        if t.kind == "op" and t.text in ("+", "-"):
            self.take()
            inner = self.unary()
            return -inner if t.text == "-" else inner
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            t = self.take()
            if t.kind != "num":
                self.fail("exponent must be a non-negative integer literal", t)
            base = base ** int(t.text)
            if self.peek().kind == "op" and self.peek().text == "^":
                self.fail("chained exponents are ambiguous; add parentheses")
        return base

    def atom(self) -> Polynomial:
        t = self.take()
        if t.kind == "num":
            return Polynomial.constant(self.ring, int(t.text))
        if t.kind == "name":
            if t.text == "i":
                return Polynomial.constant(self.ring, GaussianRational(0, 1))
            j = self.index.get(t.text)
            if j is None:
                raise ParseError(f"unknown variable {t.text!r}", self.line, t.col)
            return Polynomial.var(self.ring, j)
        if t.kind == "op" and t.text == "(":
            inner = self.expr()
            close = self.take()
            if close.text != ")":
                raise ParseError("expected ')'", self.line, close.col)
            return inner
        if t.kind == "end":
            raise ParseError("unexpected end of expression", self.line, t.col)
        raise ParseError(f"unexpected {t.text!r}", self.line, t.col)


def parse_polynomial(text: str, ring: Sequence[str], line: int | None = None,
                     column: int = 1) -> Polynomial:
    """Parse one expression over the given variables."""
    p = _Parser(_lex(text, line, column), ring, line)
    out = p.expr()
    p.expect_end()
    return out


def _check_name(name: str, line, col, seen, reserved):
    if not _IDENT.fullmatch(name):
        raise ParseError(f"{name!r} is not an identifier", line, col)
    if name == "i":
        raise ParseError("'i' is the imaginary unit and cannot name a variable", line, col)
    if name in seen:
        raise ParseError(f"variable {name!r} declared twice", line, col)
    if name in reserved:
        raise ParseError(f"variable name {name!r} is reserved for this operation", line, col)


def parse_pmap(text: str, reserved: Sequence[str] = ()) -> PmapDocument:
    """Parse a document; ``reserved`` names may not be declared as variables."""
    variables = None
    name = None
    ring_marker = None
    raw = False
    eqs: list[tuple[int, int, str]] = []
    for lineno, full in enumerate(text.splitlines(), start=1):
        body = full.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        indent = len(body) - len(body.lstrip())
        m = re.match(r"(\S+)(\s*)", body[indent:])
        kw = m.group(1)
        rest_col = indent + m.end() + 1
        rest = body[indent + m.end():].rstrip()
        if kw not in _KEYWORDS:
            raise ParseError(f"unknown directive {kw!r}; expected one of {', '.join(_KEYWORDS)}",
                             lineno, indent + 1)
        if kw == "vars":
            if variables is not None:
                raise ParseError("duplicate 'vars' header", lineno, indent + 1)
            if eqs:
                raise ParseError("'vars' must precede the equations", lineno, indent + 1)
            variables = []
            for vm in re.finditer(r"\S+", rest):
                _check_name(vm.group(), lineno, rest_col + vm.start(), variables, reserved)
                variables.append(vm.group())
            variables = tuple(variables)
        elif kw == "eq":
            if variables is None:
                raise ParseError("'eq' before the 'vars' header", lineno, indent + 1)
            if not rest:
                raise ParseError("empty equation", lineno, rest_col)
            eqs.append((lineno, rest_col, rest))
        elif kw == "name":
            if name is not None:
                raise ParseError("duplicate 'name'", lineno, indent + 1)
            name = rest
        elif kw == "ring":
            if rest != RING_MARKER:
                raise ParseError(f"unsupported ring {rest!r}; only {RING_MARKER} is available",
                                 lineno, rest_col)
            ring_marker = rest
        elif kw == "raw":
            if rest:
                raise ParseError("'raw' takes no arguments", lineno, rest_col)
            raw = True
    if variables is None:
        raise ParseError("missing 'vars' header", None, None)
    polys = [parse_polynomial(src, variables, ln, col) for ln, col, src in eqs]
    if not raw and len(polys) != len(variables):
        raise ParseError(f"arity mismatch: {len(polys)} equation(s) for {len(variables)} variable(s)",
                         eqs[-1][0] if eqs else None, None)
    return PmapDocument(variables, polys, name or None, ring_marker, raw, [ln for ln, _, _ in eqs])


def print_pmap(doc: PmapDocument | PolyMap) -> str:
    """Canonical text; ``parse_pmap(print_pmap(d)) == d``."""
    if isinstance(doc, PolyMap):
        doc = document_from_map(doc)
    out = []
    if doc.name:
        if "#" in doc.name or "\n" in doc.name:
            raise ValueError("document names may not contain '#' or newlines")
        out.append(f"name {doc.name.strip()}")
    if doc.ring_marker:
        out.append(f"ring {doc.ring_marker}")
    out.append("vars" + "".join(" " + v for v in doc.variables))
    if doc.raw:
        out.append("raw")
    for p in doc.equations:
        out.append(f"eq {p.relabel(doc.variables).to_text()}")
    return "\n".join(out) + "\n"
