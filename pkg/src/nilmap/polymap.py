"""Polynomial endomorphisms of affine space and their Jacobian calculus."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionError, PreconditionError, RingMismatchError
from .polynomial import Polynomial, dot
from .scalars import I, GaussianRational

__all__ = [
    "PolyMap", "PolyMatrix", "KellerResult", "jacobian", "determinant", "compose",
    "p_degree", "is_keller", "stable_extend", "realify", "fresh_names",
]


class PolyMap:
    """An m-tuple of polynomials in m variables.

    Composition is positional: ``F.compose(G)`` substitutes G's components for
    F's variables in order, and the result lives in G's ring.
    """

    __slots__ = ("ring", "components")

    def __init__(self, components: Sequence[Polynomial], ring: Sequence[str] | None = None):
        comps = tuple(components)
        if ring is None:
            if not comps:
                raise DimensionError("cannot infer the ring of an empty map")
            ring = comps[0].ring
        ring = tuple(ring)
        fixed = []
        for p in comps:
            if not isinstance(p, Polynomial):
                p = Polynomial.constant(ring, p)
            elif p.ring != ring:
                raise RingMismatchError(f"component ring {p.ring} versus map ring {ring}")
            fixed.append(p)
        if len(fixed) != len(ring):
            raise DimensionError(
                f"{len(fixed)} components for {len(ring)} variables; maps must be square")
        self.ring = ring
        self.components = tuple(fixed)

    @classmethod
    def identity(cls, ring) -> PolyMap:
        ring = tuple(ring)
        return cls(Polynomial.variables(ring), ring)

    @property
    def dim(self) -> int:
        return len(self.ring)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.ring == other.ring and self.components == other.components

    def __hash__(self):
        return hash((self.ring, self.components))

    def __add__(self, other: PolyMap) -> PolyMap:
        return PolyMap([a + b for a, b in zip(self.components, other.components)], self.ring)

    def __sub__(self, other: PolyMap) -> PolyMap:
        return PolyMap([a - b for a, b in zip(self.components, other.components)], self.ring)

    def __neg__(self):
        return PolyMap([-a for a in self.components], self.ring)

    def scale(self, c) -> PolyMap:
        return PolyMap([a.scale(c) for a in self.components], self.ring)

    def is_identity(self) -> bool:
        return self == PolyMap.identity(self.ring)

    def relabel(self, ring) -> PolyMap:
        ring = tuple(ring)
        return PolyMap([p.relabel(ring) for p in self.components], ring)

    def compose(self, inner: PolyMap) -> PolyMap:
        return compose(self, inner)

    def __call__(self, point):
        return self.evaluate(point)

    def evaluate(self, point) -> tuple[GaussianRational, ...]:
        return tuple(p.evaluate(point) for p in self.components)

    def degree(self) -> int:
        return p_degree(self)

    def homogeneous_part(self, k: int) -> PolyMap:
        return PolyMap([p.homogeneous_component(k) for p in self.components], self.ring)

    def truncate(self, max_degree: int) -> PolyMap:
        return PolyMap([p.truncate(max_degree) for p in self.components], self.ring)

    def jacobian(self) -> PolyMatrix:
        return jacobian(self)

    def to_text(self) -> str:
        return "(" + ", ".join(p.to_text() for p in self.components) + ")"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"PolyMap({list(self.ring)!r}, {self.to_text()})"


class PolyMatrix:
    """A rectangular matrix of polynomials over one ring."""

    __slots__ = ("ring", "entries", "rows", "cols")

    def __init__(self, entries: Sequence[Sequence[Polynomial]], ring: Sequence[str]):
        self.ring = tuple(ring)
        rows = []
        width = None
        for row in entries:
            fixed = []
            for p in row:
                if not isinstance(p, Polynomial):
                    p = Polynomial.constant(self.ring, p)
                elif p.ring != self.ring:
                    raise RingMismatchError(f"entry ring {p.ring} versus {self.ring}")
                fixed.append(p)
            if width is None:
                width = len(fixed)
            elif len(fixed) != width:
                raise DimensionError("ragged matrix")
            rows.append(tuple(fixed))
        self.entries = tuple(rows)
        self.rows = len(rows)
        self.cols = width or 0

    @classmethod
    def identity(cls, n: int, ring) -> PolyMatrix:
        one = Polynomial.constant(ring, 1)
        zero = Polynomial.zero(ring)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)], ring)

    @classmethod
    def zeros(cls, rows: int, cols: int, ring) -> PolyMatrix:
        zero = Polynomial.zero(ring)
        return cls([[zero] * cols for _ in range(rows)], ring)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.ring == other.ring and self.entries == other.entries

    def __hash__(self):
        return hash((self.ring, self.entries))

    def __add__(self, other: PolyMatrix) -> PolyMatrix:
        self._same_shape(other)
        return PolyMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
                          self.ring)

    def __sub__(self, other: PolyMatrix) -> PolyMatrix:
        self._same_shape(other)
        return PolyMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
                          self.ring)

    def scale(self, c) -> PolyMatrix:
        return PolyMatrix([[a * c for a in r] for r in self.entries], self.ring)

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise DimensionError(f"shape {self.shape} versus {other.shape}")

    def __matmul__(self, other: PolyMatrix) -> PolyMatrix:
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for row in self.entries:
            out.append([dot(self.ring, ((a, other.entries[k][j]) for k, a in enumerate(row)))
                        for j in range(other.cols)])
        return PolyMatrix(out, self.ring)

    def apply(self, vector: Sequence[Polynomial]) -> list[Polynomial]:
        """Matrix times a column vector of polynomials."""
        if len(vector) != self.cols:
            raise DimensionError("vector length does not match matrix width")
        return [dot(self.ring, zip(row, vector)) for row in self.entries]

    def trace(self) -> Polynomial:
        if self.rows != self.cols:
            raise DimensionError("trace of a non-square matrix")
        acc = Polynomial.zero(self.ring)
        for i in range(self.rows):
            acc = acc + self.entries[i][i]
        return acc

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.entries for a in r)

    def transpose(self) -> PolyMatrix:
        return PolyMatrix([list(c) for c in zip(*self.entries)], self.ring)

    def substitute(self, images) -> PolyMatrix:
        """Apply one substitution to every entry; the ring becomes the images' ring."""
        new = [[a.substitute(images) for a in r] for r in self.entries]
        ring = new[0][0].ring if new and new[0] else self.ring
        return PolyMatrix(new, ring)

    def map_entries(self, fn, ring=None) -> PolyMatrix:
        return PolyMatrix([[fn(a) for a in r] for r in self.entries], ring or self.ring)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> PolyMatrix:
        return PolyMatrix([[self.entries[i][j] for j in cols] for i in rows], self.ring)

    def determinant(self) -> Polynomial:
        return determinant(self)

    def __repr__(self):
        body = "; ".join(", ".join(a.to_text() for a in r) for r in self.entries)
        return f"PolyMatrix([{body}])"


def jacobian(F: PolyMap) -> PolyMatrix:
    """Matrix of partial derivatives dF_i/dx_j."""
    return PolyMatrix([[p.derivative(j) for j in range(F.dim)] for p in F.components], F.ring)


def _det_small(m) -> Polynomial:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    (a, b, c), (d, e, f), (g, h, i) = m
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def _pivot_score(p: Polynomial):
    return (not p.is_constant(), p.degree(), len(p))


def determinant(M: PolyMatrix) -> Polynomial:
    """Exact determinant.

    Sizes up to 3 use the explicit cofactor formula; larger matrices use
    fraction-free Bareiss elimination, whose divisions are exact in the
    polynomial ring.
    """
    if M.rows != M.cols:
        raise DimensionError(f"determinant of a {M.rows}x{M.cols} matrix")
    n = M.rows
    if n == 0:
        return Polynomial.constant(M.ring, 1)
    if n <= 3:
        return _det_small(M.entries)
    a = [list(r) for r in M.entries]
    sign = 1
    prev = Polynomial.constant(M.ring, 1)
    for k in range(n - 1):
        candidates = [i for i in range(k, n) if a[i][k]]
        if not candidates:
            return Polynomial.zero(M.ring)
        p = min(candidates, key=lambda i: _pivot_score(a[i][k]))
        if p != k:
            a[k], a[p] = a[p], a[k]
            sign = -sign
        pivot = a[k][k]
        prev_const = prev.is_constant()
        prev_inv = prev.constant_term().inverse() if prev_const else None
        same = pivot == prev
        for i in range(k + 1, n):
            lead = a[i][k]
            row_i = a[i]
            row_k = a[k]
            for j in range(k + 1, n):
                if lead:
                    num = pivot * row_i[j] - lead * row_k[j] if row_k[j] else pivot * row_i[j]
                elif same:
                    continue
                else:
                    num = pivot * row_i[j]
                if prev_const:
                    row_i[j] = num.scale(prev_inv)
                else:
                    row_i[j] = num.exact_divide(prev)
            row_i[k] = Polynomial.zero(M.ring)
        prev = pivot
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


def compose(F: PolyMap, G: PolyMap, max_degree: int | None = None) -> PolyMap:
    """F o G, i.e. x -> F(G(x)); lives in G's ring.

    ``max_degree`` truncates the result (and intermediate products).
    """
    if F.dim != len(G.components):
        raise DimensionError(f"cannot compose a map on {F.dim} variables with {len(G.components)} components")
    images = G.components
    return PolyMap([p.substitute(images, max_degree) for p in F.components], G.ring)


def p_degree(F: PolyMap) -> int:
    """Maximum total degree of the components (0 for constant maps)."""
    return max((p.degree() for p in F.components), default=0)


@dataclass(frozen=True)
class KellerResult:
    """Outcome of the Keller test: det JF a nonzero constant or not."""

    keller: bool
    determinant: Polynomial
    constant: GaussianRational | None = None

    def __bool__(self):
        return self.keller

    @property
    def witness(self) -> Polynomial | None:
        return None if self.keller else self.determinant


def is_keller(F: PolyMap) -> KellerResult:
    det = determinant(jacobian(F))
    if det.is_constant() and not det.is_zero():
        return KellerResult(True, det, det.constant_term())
    return KellerResult(False, det, None)


def fresh_names(existing: Sequence[str], count: int, prefix: str = "u") -> list[str]:
    """Deterministic new variable names that avoid ``existing``."""
    taken = set(existing)
    out = []
    k = 1
    while len(out) < count:
        name = f"{prefix}{k}"
        if name not in taken:
            out.append(name)
            taken.add(name)
        k += 1
    return out


def stable_extend(F: PolyMap, extra: int, names: Sequence[str] | None = None) -> PolyMap:
    """F x Id: act as F on the first m variables and as the identity on ``extra`` new ones."""
    if extra < 0:
        raise ValueError("extra must be non-negative")
    if extra == 0:
        return F
    if names is None:
        names = fresh_names(F.ring, extra)
    names = tuple(names)
    if len(names) != extra:
        raise DimensionError("one name per added variable required")
    clash = set(names) & set(F.ring)
    if clash or len(set(names)) != len(names):
        raise PreconditionError(f"variable name collision: {sorted(clash) or names}")
    ring = F.ring + names
    positions = list(range(F.dim))
    comps = [p.embed(ring, positions) for p in F.components]
    comps += [Polynomial.var(ring, F.dim + k) for k in range(extra)]
    return PolyMap(comps, ring)


def realification_ring(ring: Sequence[str]) -> tuple[str, ...]:
    out = []
    for name in ring:
        out += [f"{name}_re", f"{name}_im"]
    return tuple(out)


def complexify_substitution(ring: Sequence[str]) -> list[Polynomial]:
    """Images x_j -> u_j + i v_j in the realification ring."""
    real_ring = realification_ring(ring)
    return [Polynomial.var(real_ring, 2 * j) + Polynomial.var(real_ring, 2 * j + 1).scale(I)
            for j in range(len(ring))]


def realify(F: PolyMap) -> PolyMap:
    """(Re F_1, Im F_1, ..., Re F_m, Im F_m) on 2m real variables."""
    images = complexify_substitution(F.ring)
    real_ring = realification_ring(F.ring)
    comps = []
    for p in F.components:
        q = p.substitute(images)
        comps += [q.real_part(), q.imag_part()]
    return PolyMap(comps, real_ring)


def realify_polynomial(p: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Real and imaginary parts of p(u + i v) as real polynomials."""
    q = p.substitute(complexify_substitution(p.ring))
    return q.real_part(), q.imag_part()
