"""Invertible coordinate changes and equivalence witnesses.

Automorphisms are positional: they know their dimension, and
``as_polymap(ring)`` writes their defining polynomials over any ring of that
size.  Composition factors are stored outermost first, so
``Composition([a, b])`` is the map ``a o b``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from . import exactlinalg
from .errors import DimensionError, PreconditionError
from .polymap import PolyMap, compose
from .polynomial import Polynomial
from .scalars import ONE, ZERO, GaussianRational, as_gr

__all__ = [
    "Automorphism", "Linear", "Translation", "Triangular", "Composition",
    "EquivalenceWitness", "as_polymap", "invert_automorphism", "equivalence_apply",
    "verify_witness", "tame_generator", "default_ring", "permutation",
]


def default_ring(n: int) -> tuple[str, ...]:
    return tuple(f"x{k + 1}" for k in range(n))


class Automorphism:
    """Base class; subclasses are immutable."""

    dim: int

    def as_polymap(self, ring: Sequence[str] | None = None) -> PolyMap:
        raise NotImplementedError

    def inverse(self) -> Automorphism:
        raise NotImplementedError

    def insert_identity(self, position: int, count: int) -> Automorphism:
        """Extend by identity on ``count`` new coordinates inserted at ``position``."""
        raise NotImplementedError

    def to_record(self) -> dict:
        raise NotImplementedError

    def _ring(self, ring):
        ring = default_ring(self.dim) if ring is None else tuple(ring)
        if len(ring) != self.dim:
            raise DimensionError(f"ring of size {len(ring)} for an automorphism of dimension {self.dim}")
        return ring

    def jacobian_constant(self) -> GaussianRational:
        """det of the Jacobian, a nonzero constant for every automorphism."""
        raise NotImplementedError

    def __eq__(self, other):
        if not isinstance(other, Automorphism):
            return NotImplemented
        return self.dim == other.dim and self.as_polymap() == other.as_polymap()

    def __hash__(self):
        return hash(self.as_polymap())


class Linear(Automorphism):
    """x -> A x with an invertible constant matrix A."""

    def __init__(self, matrix):
        m = exactlinalg.to_matrix(matrix)
        n = len(m)
        if any(len(r) != n for r in m):
            raise DimensionError("linear automorphism needs a square matrix")
        d = exactlinalg.det(m) if n else ONE
        if d.is_zero():
            raise PreconditionError("linear automorphism with singular matrix")
        self.matrix = tuple(tuple(r) for r in m)
        self.dim = n
        self.det = d

    @classmethod
    def identity(cls, n: int) -> Linear:
        return cls(exactlinalg.identity(n))

    def as_polymap(self, ring=None) -> PolyMap:
        ring = self._ring(ring)
        xs = Polynomial.variables(ring)
        comps = []
        for row in self.matrix:
            terms = {}
            for j, a in enumerate(row):
                if a:
                    terms[tuple(1 if k == j else 0 for k in range(self.dim))] = a
            comps.append(Polynomial(ring, terms))
        return PolyMap(comps, ring) if comps else PolyMap(xs, ring)

    def inverse(self) -> Linear:
        return Linear(exactlinalg.inverse(self.matrix))

    def insert_identity(self, position, count):
        n = self.dim + count
        old = [k if k < position else k + count for k in range(self.dim)]
        m = exactlinalg.identity(n)
        for i in range(self.dim):
            for j in range(self.dim):
                m[old[i]][old[j]] = self.matrix[i][j]
        return Linear(m)

    def jacobian_constant(self):
        return self.det

    def to_record(self):
        return {"kind": "linear", "matrix": [[str(a) for a in r] for r in self.matrix]}

    def __repr__(self):
        return f"Linear({[[str(a) for a in r] for r in self.matrix]})"


def permutation(perm: Sequence[int]) -> Linear:
    """Linear automorphism whose i-th output coordinate is x_{perm[i]}."""
    n = len(perm)
    return Linear([[ONE if j == perm[i] else ZERO for j in range(n)] for i in range(n)])


class Translation(Automorphism):
    """x -> x + b."""

    def __init__(self, vector):
        self.vector = tuple(as_gr(v) for v in vector)
        self.dim = len(self.vector)

    def as_polymap(self, ring=None) -> PolyMap:
        ring = self._ring(ring)
        xs = Polynomial.variables(ring)
        return PolyMap([x + b for x, b in zip(xs, self.vector)], ring)

    def inverse(self) -> Translation:
        return Translation([-b for b in self.vector])

    def insert_identity(self, position, count):
        v = list(self.vector)
        return Translation(v[:position] + [ZERO] * count + v[position:])

    def jacobian_constant(self):
        return ONE

    def to_record(self):
        return {"kind": "translation", "vector": [str(b) for b in self.vector]}

    def __repr__(self):
        return f"Translation({[str(b) for b in self.vector]})"


class Triangular(Automorphism):
    """x_i -> x_i + h_i(earlier variables).

    ``order`` lists the coordinates from first to last; the shift of
    coordinate ``order[k]`` may only involve ``order[0..k-1]``.  With the
    default order this is the usual x_i + h_i(x_1, ..., x_{i-1}).
    """

    def __init__(self, shifts: Sequence[Polynomial], order: Sequence[int] | None = None):
        shifts = list(shifts)
        n = len(shifts)
        if n == 0:
            raise DimensionError("triangular automorphism needs at least one coordinate")
        ring = shifts[0].ring
        if len(ring) != n:
            raise DimensionError("one shift polynomial per coordinate, over a ring of that size")
        order = tuple(range(n)) if order is None else tuple(order)
        if sorted(order) != list(range(n)):
            raise PreconditionError(f"order {order} is not a permutation of 0..{n - 1}")
        allowed: set[int] = set()
        for i in order:
            h = shifts[i]
            if h.ring != ring:
                raise PreconditionError("shift polynomials must share one ring")
            bad = h.support_variables() - allowed
            if bad:
                raise PreconditionError(
                    f"shift of coordinate {i} uses variables {sorted(bad)} that are not earlier in the order")
            allowed.add(i)
        self.shifts = tuple(shifts)
        self.order = order
        self.dim = n

    def as_polymap(self, ring=None) -> PolyMap:
        ring = self._ring(ring)
        xs = Polynomial.variables(ring)
        return PolyMap([x + h.relabel(ring) for x, h in zip(xs, self.shifts)], ring)

    def inverse(self) -> Triangular:
        ring = self.shifts[0].ring
        ys = Polynomial.variables(ring)
        # x_i = y_i - h_i(x_earlier), resolved along the order
        xs = list(ys)
        for i in self.order:
            h = self.shifts[i]
            if h.is_zero():
                continue
            xs[i] = ys[i] - h.substitute(xs)
        return Triangular([x - y for x, y in zip(xs, ys)], self.order)

    def insert_identity(self, position, count):
        n = self.dim + count
        ring = default_ring(n)
        old = [k if k < position else k + count for k in range(self.dim)]
        shifts = [Polynomial.zero(ring)] * n
        for i, h in enumerate(self.shifts):
            shifts[old[i]] = h.embed(ring, old)
        order = [position + k for k in range(count)] + [old[i] for i in self.order]
        return Triangular(shifts, order)

    def jacobian_constant(self):
        return ONE

    def to_record(self):
        ring = self.shifts[0].ring
        return {"kind": "triangular", "ring": list(ring), "order": list(self.order),
                "shifts": [h.to_text() for h in self.shifts]}

    def __repr__(self):
        return f"Triangular({[h.to_text() for h in self.shifts]}, order={list(self.order)})"


class Composition(Automorphism):
    """factors[0] o factors[1] o ... ; an empty composition is the identity."""

    def __init__(self, factors: Sequence[Automorphism], dim: int | None = None):
        factors = tuple(factors)
        dims = {f.dim for f in factors}
        if dim is not None:
            dims.add(dim)
        if len(dims) != 1:
            raise DimensionError(f"factors of different dimensions {sorted(dims)}")
        self.factors = factors
        self.dim = dims.pop()

    def as_polymap(self, ring=None) -> PolyMap:
        ring = self._ring(ring)
        result = PolyMap.identity(ring)
        # innermost first, so each step is outer o (current)
        for f in reversed(self.factors):
            result = compose(f.as_polymap(ring), result)
        return result

    def inverse(self) -> Composition:
        return Composition([f.inverse() for f in reversed(self.factors)], self.dim)

    def insert_identity(self, position, count):
        return Composition([f.insert_identity(position, count) for f in self.factors],
                           self.dim + count)

    def jacobian_constant(self):
        c = ONE
        for f in self.factors:
            c = c * f.jacobian_constant()
        return c

    def to_record(self):
        return {"kind": "composition", "dim": self.dim,
                "factors": [f.to_record() for f in self.factors]}

    def __repr__(self):
        return f"Composition({list(self.factors)!r})"


def automorphism_from_record(record: dict) -> Automorphism:
    from .pmap import parse_polynomial

    kind = record["kind"]
    if kind == "linear":
        return Linear([[_parse_scalar(a) for a in r] for r in record["matrix"]])
    if kind == "translation":
        return Translation([_parse_scalar(b) for b in record["vector"]])
    if kind == "triangular":
        ring = tuple(record["ring"])
        shifts = [parse_polynomial(text, ring) for text in record["shifts"]]
        return Triangular(shifts, record["order"])
    if kind == "composition":
        return Composition([automorphism_from_record(f) for f in record["factors"]], record["dim"])
    raise ValueError(f"unknown automorphism kind {kind!r}")


def _parse_scalar(text: str) -> GaussianRational:
    from .pmap import parse_polynomial

    return parse_polynomial(text, ()).as_constant()


def as_polymap(a: Automorphism, ring=None) -> PolyMap:
    return a.as_polymap(ring)


def invert_automorphism(a: Automorphism) -> Automorphism:
    return a.inverse()


@dataclass(frozen=True)
class EquivalenceWitness:
    """Automorphisms H (preimage side) and R (image side) with R o G = F o H."""

    H: Automorphism
    R: Automorphism

    def __post_init__(self):
        if self.H.dim != self.R.dim:
            raise DimensionError("witness automorphisms of different dimensions")

    @property
    def source_dim(self) -> int:
        return self.H.dim

    @property
    def target_dim(self) -> int:
        return self.R.dim

    @classmethod
    def identity(cls, n: int) -> EquivalenceWitness:
        return cls(Composition((), n), Composition((), n))

    def then(self, inner: EquivalenceWitness) -> EquivalenceWitness:
        """Chain: if self relates F to G and ``inner`` relates G to K, the result relates F to K."""
        return EquivalenceWitness(Composition([self.H, inner.H]), Composition([self.R, inner.R]))

    def insert_identity(self, position: int, count: int) -> EquivalenceWitness:
        return EquivalenceWitness(self.H.insert_identity(position, count),
                                  self.R.insert_identity(position, count))

    def to_record(self) -> dict:
        return {"H": self.H.to_record(), "R": self.R.to_record()}

    @classmethod
    def from_record(cls, record: dict) -> EquivalenceWitness:
        return cls(automorphism_from_record(record["H"]), automorphism_from_record(record["R"]))


def _check_dims(w: EquivalenceWitness, G: PolyMap):
    if w.H.dim != G.dim:
        raise DimensionError(f"witness of dimension {w.H.dim} applied to a map of dimension {G.dim}")


def equivalence_apply(w: EquivalenceWitness, G: PolyMap) -> PolyMap:
    """The map F = R o G o H^-1 that the witness relates to G."""
    _check_dims(w, G)
    h_inv = w.H.inverse().as_polymap(G.ring)
    r = w.R.as_polymap(G.ring)
    return compose(compose(r, G), h_inv)


def verify_witness(w: EquivalenceWitness, F: PolyMap, G: PolyMap) -> bool:
    """Exact replay: does R o G equal F o H?"""
    _check_dims(w, G)
    if F.dim != G.dim:
        raise DimensionError("F and G have different dimensions")
    lhs = compose(w.R.as_polymap(G.ring), G)
    rhs = compose(F, w.H.as_polymap(G.ring))
    return lhs == rhs


def _random_linear(rng: random.Random, n: int, bound: int = 2) -> Linear:
    while True:
        rows = [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(n)]
        if not exactlinalg.det(rows).is_zero():
            return Linear(rows)


def random_polynomial(rng: random.Random, ring, variables: Sequence[int], min_deg: int,
                      max_deg: int, max_terms: int = 3, coeff_bound: int = 3) -> Polynomial:
    """A few random monomials in the chosen variables with small integer coefficients."""
    if not variables or max_deg < min_deg:
        return Polynomial.zero(ring)
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        deg = rng.randint(min_deg, max_deg)
        mono = [0] * len(ring)
        for _ in range(deg):
            mono[rng.choice(variables)] += 1
        c = 0
        while c == 0:
            c = rng.randint(-coeff_bound, coeff_bound)
        terms[tuple(mono)] = terms.get(tuple(mono), 0) + c
    return Polynomial(ring, terms)


def random_triangular(rng: random.Random, n: int, max_deg: int, shuffle: bool = True) -> Triangular:
    ring = default_ring(n)
    order = list(range(n))
    if shuffle:
        rng.shuffle(order)
    shifts = [Polynomial.zero(ring)] * n
    for k, i in enumerate(order):
        if k:
            shifts[i] = random_polynomial(rng, ring, order[:k], 1, max_deg)
    return Triangular(shifts, order)


def tame_generator(seed, dim: int, steps: int, max_deg: int) -> Automorphism:
    """Deterministic random composition of linear and triangular automorphisms.

    The Keller constant of the result is the product of the linear
    determinants.
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    rng = random.Random(seed)
    factors = []
    for _ in range(steps):
        if rng.random() < 0.5:
            factors.append(_random_linear(rng, dim))
        else:
            factors.append(random_triangular(rng, dim, max_deg))
    return Composition(factors, dim)
