"""Nilpotency tests, the T-bridge to Keller maps, Euler identity checks,
generic Jacobian rank and real sign-pattern classification."""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from . import exactlinalg
from .errors import DimensionError, PreconditionError
from .polymap import PolyMap, PolyMatrix, determinant, is_keller, jacobian
from .polynomial import Polynomial, _accumulate, _mul_into, _prune
from .scalars import ONE, ExtensionScalar, GaussianRational

__all__ = [
    "NilpotencyResult", "is_nilpotent", "is_nilpotent_matrix", "lemma1_bridge",
    "euler_identity_check", "two_form_identity_check", "closed_form_eigenvalue",
    "jacobian_rank", "jacobian_rank_detail", "sign_classify", "SignClass", "SignReport",
]


# --- nilpotency ---------------------------------------------------------------


@dataclass(frozen=True)
class NilpotencyResult:
    nilpotent: bool
    power: int | None = None          # k with trace(M^k) != 0
    trace: Polynomial | None = None   # that trace, the witness
    index: int | None = None          # smallest k with M^k = 0, when reached

    def __bool__(self):
        return self.nilpotent

    @property
    def witness(self):
        return self.trace


def _sparse_rows(M: PolyMatrix):
    return [{j: p for j, p in enumerate(row) if p} for row in M.entries]


def _sparse_matmul(A, B, ring):
    out = []
    for row in A:
        acc: dict = {}
        for k, a in row.items():
            for j, b in B[k].items():
                slot = acc.get(j)
                if slot is None:
                    slot = acc[j] = ({}, {})
                re, im = slot
                _mul_into(re, a._re, b._re)
                if a._im and b._im:
                    _mul_into(re, a._im, b._im, negate=True)
                if b._im:
                    _mul_into(im, a._re, b._im)
                if a._im:
                    _mul_into(im, a._im, b._re)
        new_row = {}
        for j, (re, im) in acc.items():
            p = Polynomial._make(ring, _prune(re), _prune(im))
            if p:
                new_row[j] = p
        out.append(new_row)
    return out


def is_nilpotent_matrix(M: PolyMatrix) -> NilpotencyResult:
    """Nilpotency over the function field via traces of powers.

    In characteristic zero M is nilpotent iff trace(M^k) vanishes for
    k = 1..n.  Stops early at the first nonzero trace, or as soon as a power
    is the zero matrix.
    """
    if M.rows != M.cols:
        raise DimensionError("nilpotency of a non-square matrix")
    n = M.rows
    base = _sparse_rows(M)
    power = base
    for k in range(1, n + 1):
        if not any(power):
            return NilpotencyResult(True, index=k)
        re: dict = {}
        im: dict = {}
        for i, row in enumerate(power):
            p = row.get(i)
            if p is not None:
                _accumulate(re, p._re)
                _accumulate(im, p._im)
        tr = Polynomial._make(M.ring, re, im)
        if tr:
            return NilpotencyResult(False, power=k, trace=tr)
        if k < n:
            power = _sparse_matmul(power, base, M.ring)
    return NilpotencyResult(True, index=None if any(power) else n)


def is_nilpotent(N: PolyMap) -> NilpotencyResult:
    """Is the Jacobian matrix of N nilpotent?"""
    return is_nilpotent_matrix(jacobian(N))


def lemma1_bridge(N: PolyMap, t_name: str = "t") -> PolyMap:
    """(Id - T*N) x Id on the variables (x_1, ..., x_n, T)."""
    if t_name in N.ring:
        raise PreconditionError(f"variable name {t_name!r} already used")
    ring = N.ring + (t_name,)
    n = N.dim
    positions = list(range(n))
    t = Polynomial.var(ring, n)
    comps = [Polynomial.var(ring, i) - t * p.embed(ring, positions)
             for i, p in enumerate(N.components)]
    comps.append(t)
    return PolyMap(comps, ring)


# --- Euler identities ------------------------------------------------------------


@dataclass(frozen=True)
class IdentityCheck:
    passed: bool
    failing_component: int | None = None
    detail: str = ""
    extra: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed


def _euler_vector(N: PolyMap) -> list[Polynomial]:
    """JN(X) applied to the position vector X."""
    xs = Polynomial.variables(N.ring)
    return jacobian(N).apply(xs)


def euler_identity_check(N: PolyMap, k: int) -> IdentityCheck:
    """Check JN(X) X = k N(X) for N homogeneous of degree k."""
    for i, p in enumerate(N.components):
        if not p.is_homogeneous(k):
            raise PreconditionError(f"component {i} is not homogeneous of degree {k}")
    lhs = _euler_vector(N)
    for i, (a, p) in enumerate(zip(lhs, N.components)):
        if a != p.scale(k):
            return IdentityCheck(False, i, f"JN.X differs from {k}*N in component {i}")
    return IdentityCheck(True)


def _lambda_power(e: int, d: int, c) -> ExtensionScalar:
    return ExtensionScalar.generator(d, c) ** e


def _scale_ext(p: Polynomial, s: ExtensionScalar) -> list[Polynomial]:
    return [p.scale(a) if a else Polynomial.zero(p.ring) for a in s.coords]


def _add_ext(u: list[Polynomial], v: list[Polynomial]) -> list[Polynomial]:
    return [a + b for a, b in zip(u, v)]


def _at_lambda_x(p: Polynomial, d: int, c) -> list[Polynomial]:
    """p(lam X) as coordinates in the basis 1, lam, ..., lam^{d-1}."""
    out = [Polynomial.zero(p.ring)] * d
    for deg, piece in p.homogeneous_components().items():
        out = _add_ext(out, _scale_ext(piece, _lambda_power(deg, d, c)))
    return out


def closed_form_eigenvalue(k1: int, k2: int) -> ExtensionScalar:
    """k1 * lam^(k1-1) with lam^(k2-k1) = k1/k2.

    Its (k2-k1)-th power is k1^(k2-1) / k2^(k1-1).
    """
    if not 0 < k1 < k2:
        raise PreconditionError("need 0 < k1 < k2")
    d = k2 - k1
    c = GaussianRational(k1) / k2
    return ExtensionScalar.embed(k1, d, c) * _lambda_power(k1 - 1, d, c)


def two_form_identity_check(N1: PolyMap, N2: PolyMap, k1: int, k2: int,
                            fixed_point: Sequence | None = None) -> IdentityCheck:
    """Check J(N1+N2)(lam X) X = k1 lam^(k1-1) (N1+N2)(X) over Q(i)[lam]/(lam^d - k1/k2).

    With ``fixed_point`` the eigenvalue relation at lam*x is also evaluated and
    reported in ``extra``.
    """
    if not 0 < k1 < k2:
        raise PreconditionError("need 0 < k1 < k2")
    if N1.ring != N2.ring:
        raise DimensionError("the two forms must live on the same variables")
    for i, p in enumerate(N1.components):
        if not p.is_homogeneous(k1):
            raise PreconditionError(f"first form: component {i} is not homogeneous of degree {k1}")
    for i, p in enumerate(N2.components):
        if not p.is_homogeneous(k2):
            raise PreconditionError(f"second form: component {i} is not homogeneous of degree {k2}")
    d = k2 - k1
    c = GaussianRational(k1) / k2
    N = N1 + N2
    J = jacobian(N)
    xs = Polynomial.variables(N.ring)
    eig = closed_form_eigenvalue(k1, k2)
    extra = {"eigenvalue": eig, "d": d, "c": c}
    for i in range(N.dim):
        lhs = [Polynomial.zero(N.ring)] * d
        for j in range(N.dim):
            scaled = _at_lambda_x(J[i, j], d, c)
            lhs = _add_ext(lhs, [q * xs[j] for q in scaled])
        rhs = _scale_ext(N.components[i], eig)
        if lhs != rhs:
            return IdentityCheck(False, i, f"identity fails in component {i}", extra)
    if fixed_point is not None:
        extra.update(_fixed_point_eigen(N, J, list(fixed_point), d, c, eig))
    return IdentityCheck(True, None, "", extra)


def _fixed_point_eigen(N, J, x, d, c, eig):
    from .scalars import as_gr

    x = [as_gr(v) for v in x]
    is_fixed = list(N.evaluate(x)) == x
    vec = []
    for i in range(N.dim):
        acc = ExtensionScalar(d, c)
        for j in range(N.dim):
            for deg, piece in J[i, j].homogeneous_components().items():
                acc = acc + _lambda_power(deg, d, c) * ExtensionScalar.embed(piece.evaluate(x) * x[j], d, c)
        vec.append(acc)
    expected = [eig * ExtensionScalar.embed(v, d, c) for v in x]
    return {"fixed_point": is_fixed, "eigen_relation": vec == expected,
            "nonzero_point": any(not v.is_zero() for v in x)}


# --- rank ------------------------------------------------------------------------


def jacobian_rank_detail(N: PolyMap, exact_limit: int = 4, samples: int = 6,
                         seed: int = 0) -> tuple[int, bool]:
    """(rank, exact).  Minors are enumerated up to ``exact_limit`` variables;
    beyond that the rank at random rational points is a certified lower bound."""
    J = jacobian(N)
    n = N.dim
    if n <= exact_limit:
        for s in range(n, 0, -1):
            for rows in itertools.combinations(range(n), s):
                for cols in itertools.combinations(range(n), s):
                    if determinant(J.submatrix(rows, cols)):
                        return s, True
        return 0, True
    rng = random.Random(seed)
    best = 0
    for _ in range(samples):
        point = [GaussianRational(rng.randint(-50, 50)) for _ in range(n)]
        values = [[J[i, j].evaluate(point) for j in range(n)] for i in range(n)]
        best = max(best, exactlinalg.rank(values))
        if best == n:
            break
    return best, False


def jacobian_rank(N: PolyMap) -> int:
    """Generic rank of JN over the function field."""
    return jacobian_rank_detail(N)[0]


# --- sign patterns -------------------------------------------------------------------


class SignClass(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEITHER = "neither"


@dataclass(frozen=True)
class SignReport:
    classification: SignClass
    invertibility_implied: bool
    reason: str
    degrees: tuple[int, ...] = ()


def _part_signs(part: Polynomial) -> set[int]:
    return {1 if c.re > 0 else -1 for c in part.terms.values()}


def sign_classify(F: PolyMap) -> SignReport:
    """Classify F = Id + F_(2) + ... + F_(m) with real coefficients by coefficient signs.

    The report also says whether one of the known sign-pattern corollaries
    guarantees invertibility.
    """
    for i, p in enumerate(F.components):
        if not p.is_real():
            raise PreconditionError(f"component {i} has non-real coefficients")
    if any(not p.constant_term().is_zero() for p in F.components):
        raise PreconditionError("F has a constant part; expected F(0) = 0")
    if F.homogeneous_part(1) != PolyMap.identity(F.ring):
        raise PreconditionError("degree-one part of F is not the identity")
    degrees = sorted({k for p in F.components for k in p.homogeneous_components() if k >= 2})
    signs_by_degree = {}
    for k in degrees:
        s = set()
        for p in F.components:
            s |= _part_signs(p.homogeneous_component(k))
        signs_by_degree[k] = s
    all_signs = set().union(*signs_by_degree.values()) if degrees else set()
    if all_signs <= {1}:
        cls = SignClass.POSITIVE
    elif all_signs == {-1}:
        cls = SignClass.NEGATIVE
    else:
        cls = SignClass.NEITHER

    if not degrees:
        return SignReport(cls, True, "F is the identity", ())

    keller = is_keller(F)
    real_keller = bool(keller) and keller.constant.is_real()
    N = F - PolyMap.identity(F.ring)
    if cls is SignClass.NEGATIVE and real_keller:
        return SignReport(cls, True, "negative mapping with constant real Jacobian", tuple(degrees))
    if cls is SignClass.POSITIVE:
        if is_nilpotent(N):
            return SignReport(cls, True, "F = Id + N with N positive nilpotent", tuple(degrees))
        if real_keller and all(k % 2 == 0 for k in degrees):
            return SignReport(cls, True, "positive mapping with only even-degree parts", tuple(degrees))
    alternating = all(signs_by_degree[k] == {(-1) ** k} for k in degrees)
    if alternating and real_keller:
        return SignReport(cls, True, "alternating signs Id + F_(2) - F_(3) + ...", tuple(degrees))
    return SignReport(cls, False, "no sign-pattern corollary applies", tuple(degrees))
