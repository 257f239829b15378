"""Fixed points of polynomial maps: exact checks, triangular solving, numeric search."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np

from ._newton import _eval_np, compile_system, newton_multistart, random_starts, resolve_backend
from .errors import DimensionError, PreconditionError
from .nilpotency import is_nilpotent
from .polymap import PolyMap
from .polynomial import Polynomial
from .scalars import GaussianRational, as_gr

__all__ = [
    "fixed_point_verify", "triangular_fixed_solve", "FixedPointSearch", "Cluster",
    "fixed_point_search", "reconstruct_point", "DegreeEstimate", "degree_estimate",
]

DEFAULT_TOL = 1e-10
DEFAULT_DEDUP = 1e-6
DEFAULT_DENOMINATOR_BOUND = 10 ** 6


def fixed_point_verify(N: PolyMap, x) -> bool:
    """True iff N(x) = x exactly."""
    if len(x) != N.dim:
        raise DimensionError(f"point of length {len(x)} for a map of dimension {N.dim}")
    pt = [as_gr(v) for v in x]
    return list(N.evaluate(pt)) == pt


def _solve_order(N: PolyMap, order=None):
    deps = [p.support_variables() for p in N.components]
    n = N.dim
    if order is not None:
        order = list(order)
        if sorted(order) != list(range(n)):
            raise PreconditionError(f"{order} is not a permutation of range({n})")
        seen: set[int] = set()
        for i in order:
            if not deps[i] <= seen:
                return None
            seen.add(i)
        return order
    # Kahn's algorithm, lowest index first so the order is deterministic
    out, solved = [], set()
    pending = list(range(n))
    while pending:
        ready = [i for i in pending if deps[i] <= solved]
        if not ready:
            return None
        i = ready[0]
        out.append(i)
        solved.add(i)
        pending.remove(i)
    return out


def triangular_fixed_solve(N: PolyMap, order=None):
    """Solve N(x) = x by back-substitution.

    Applies when each component depends only on coordinates solved before
    it in some order (triangular, anti-triangular, or a permutation of
    either; ``order`` can pin the permutation).  The solution is then
    unique and returned as a one-element list.  Returns None when the
    dependency pattern has a cycle, a self-dependence included.
    """
    seq = _solve_order(N, order)
    if seq is None:
        return None
    vals: list = [None] * N.dim
    zero = GaussianRational()
    for i in seq:
        p = N.components[i]
        pt = [v if v is not None else zero for v in vals]
        vals[i] = p.evaluate(pt)
    return [tuple(vals)]


def _exact_fraction(v) -> Fraction | None:
    q = gmpy2.mpq(v) if gmpy2.is_finite(v) else None
    return None if q is None else Fraction(int(q.numerator), int(q.denominator))


def reconstruct_point(z, denominator_bound: int = DEFAULT_DENOMINATOR_BOUND,
                      closeness: float = 1e-12):
    """Continued-fraction reconstruction of a complex point, or None.

    Coordinates may be Python complex or gmpy2 mpc.  Real and imaginary
    parts are rounded independently; a part is rejected when the rational
    lies further than ``closeness`` (relative) from the input.
    """
    out = []
    for c in z:
        parts = []
        for v in (c.real, c.imag):
            exact = _exact_fraction(v)
            if exact is None:
                return None
            q = exact.limit_denominator(denominator_bound)
            if abs(q - exact) > closeness * max(1, abs(exact)):
                return None
            parts.append(q)
        out.append(GaussianRational(parts[0], parts[1]))
    return tuple(out)


@dataclass
class Cluster:
    point: tuple            # representative, complex floats (refined when confirmed)
    size: int
    first_seed: int
    confirmed: bool = False      # high-precision Newton converged from the representative
    exact: tuple | None = None   # verified rational point, if any
    refined: tuple | None = field(default=None, repr=False, compare=False)


REFINE_BITS = 200


def _mp_eval(compiled, x, width):
    coefs, exps, slot = compiled
    out = [gmpy2.mpc(0)] * width
    for c, e, k in zip(coefs, exps, slot):
        v = c
        for j, p in enumerate(e):
            if p:
                v *= x[j] ** p
        out[k] += v
    return out


def _mp_solve(A, b):
    n = len(b)
    A = [row[:] for row in A]
    b = b[:]
    for k in range(n):
        p = max(range(k, n), key=lambda r: abs(A[r][k]))
        if A[p][k] == 0:
            return None
        A[k], A[p] = A[p], A[k]
        b[k], b[p] = b[p], b[k]
        for r in range(k + 1, n):
            f = A[r][k] / A[k][k]
            for c in range(k, n):
                A[r][c] -= f * A[k][c]
            b[r] -= f * b[k]
    out = [gmpy2.mpc(0)] * n
    for k in range(n - 1, -1, -1):
        s = b[k] - sum((A[k][c] * out[c] for c in range(k + 1, n)), gmpy2.mpc(0))
        out[k] = s / A[k][k]
    return out


def _exact_terms(polys):
    coefs, exps, slot = [], [], []
    for k, p in enumerate(polys):
        for m, c in p.terms.items():
            coefs.append(gmpy2.mpc(gmpy2.mpfr(c.re), gmpy2.mpfr(c.im)))
            exps.append(m)
            slot.append(k)
    return coefs, exps, slot


def _refine(F: PolyMap, point, iterations: int = 40):
    """High-precision Newton on F = 0 from ``point``; complex result or None."""
    n = F.dim
    with gmpy2.context(gmpy2.get_context(), precision=REFINE_BITS):
        J = F.jacobian()
        vals = _exact_terms(F.components)
        jac = _exact_terms([J[i, j] for i in range(n) for j in range(n)])
        x = [gmpy2.mpc(complex(v)) for v in point]
        # half the working precision: ill-conditioned roots stall just above the rounding floor
        eps = gmpy2.mpfr(2) ** (-(REFINE_BITS // 2))
        for _ in range(iterations):
            f = _mp_eval(vals, x, n)
            jv = _mp_eval(jac, x, n * n)
            step = _mp_solve([[jv[i * n + j] for j in range(n)] for i in range(n)], f)
            if step is None:
                return None
            x = [a - d for a, d in zip(x, step)]
            scale = 1 + max((abs(a) for a in x), default=0)
            if max((abs(d) for d in step), default=0) <= eps * scale:
                return tuple(x)
        return None


@dataclass
class FixedPointSearch:
    clusters: list[Cluster]
    seeds: int
    converged: int
    nilpotent: bool | None
    backend: str
    tol: float
    dedup_radius: float

    @property
    def approximate(self) -> list[tuple]:
        return [c.point for c in self.clusters]

    @property
    def exact(self) -> list[tuple]:
        seen = []
        for c in self.clusters:
            if c.exact is not None and c.exact not in seen:
                seen.append(c.exact)
        return seen

    @property
    def violation(self) -> bool:
        """Two or more verified-distinct fixed points of a nilpotent map."""
        return bool(self.nilpotent) and len(self.exact) >= 2


def _cluster(points, mask, radius):
    clusters: list[Cluster] = []
    reps = []
    for s in range(points.shape[0]):
        if not mask[s]:
            continue
        p = points[s]
        for c, r in zip(clusters, reps):
            if np.max(np.abs(p - r)) <= radius:
                c.size += 1
                break
        else:
            clusters.append(Cluster(tuple(complex(v) for v in p), 1, s))
            reps.append(p)
    return clusters


def _track_homotopy(N: PolyMap, max_steps: int = 4000):
    """Follow x(s) with x = s*N(x) from (0, 0) to s = 1; endpoint or None.

    For nilpotent N the Jacobian E - s*JN has determinant 1 for every s, so
    the path has no turning points; it can still escape to infinity.
    """
    n = N.dim
    if n == 0:
        return None
    sys = compile_system(N)

    def ev(x):
        v, _ = _eval_np(x[None, :], sys.coefs, sys.exps, sys.slot, n)
        j, _ = _eval_np(x[None, :], sys.jcoefs, sys.jexps, sys.jslot, n * n)
        return v[0], j[0].reshape(n, n)

    eye = np.eye(n, dtype=np.complex128)
    x = np.zeros(n, dtype=np.complex128)
    s, ds = 0.0, 1.0 / 16
    with np.errstate(all="ignore"):
        for _ in range(max_steps):
            if s >= 1.0:
                return x
            s1 = min(1.0, s + ds)
            try:
                v, J = ev(x)
                xp = x + (s1 - s) * np.linalg.solve(eye - s * J, v)
                ok = False
                for _ in range(8):
                    v, J = ev(xp)
                    step = np.linalg.solve(eye - s1 * J, xp - s1 * v)
                    xp = xp - step
                    if not np.all(np.isfinite(xp)):
                        break
                    if np.max(np.abs(step)) <= 1e-8 * (1 + np.max(np.abs(xp))):
                        ok = True
                        break
            except np.linalg.LinAlgError:
                ok = False
            if ok:
                x, s, ds = xp, s1, min(2 * ds, 0.25)
            else:
                ds /= 2
                if ds < 1e-9:
                    return None
    return None


def _confirm(system: PolyMap, clusters: list[Cluster], radius: float) -> list[Cluster]:
    """Refine every representative; merge clusters that refine to the same root."""
    merged: list[Cluster] = []
    for c in clusters:
        hi = _refine(system, c.point)
        if hi is not None:
            c.refined = hi
            c.confirmed = True
            c.point = tuple(complex(v) for v in hi)
            for m in merged:
                if m.confirmed and max(abs(a - b) for a, b in zip(m.point, c.point)) <= radius:
                    m.size += c.size
                    break
            else:
                merged.append(c)
        else:
            merged.append(c)
    return merged


def _shift(F: PolyMap, target=None, minus_identity=False) -> PolyMap:
    comps = []
    for i, p in enumerate(F.components):
        q = p
        if minus_identity:
            q = q - Polynomial.var(F.ring, i)
        if target is not None:
            q = q - Polynomial.constant(F.ring, target[i])
        comps.append(q)
    return PolyMap(comps, F.ring)


def fixed_point_search(N: PolyMap, seeds: int = 64, tol: float = DEFAULT_TOL,
                       dedup_radius: float = DEFAULT_DEDUP, seed: int = 0,
                       max_iter: int = 100, denominator_bound: int = DEFAULT_DENOMINATOR_BOUND,
                       nilpotent: bool | None = None, backend: str = "auto",
                       continuation: bool = True) -> FixedPointSearch:
    """Multistart Newton on N(x) - x = 0 with exact re-verification.

    Starts are drawn from a PCG64 stream seeded by ``seed``; with
    ``continuation`` the endpoint of the path x = s*N(x), s: 0 -> 1, is
    appended as one more start.  Clusters are formed greedily in start
    order, so the outcome does not depend on how starts are scheduled.
    Every cluster is refined at high precision; unconfirmed clusters stay in
    the approximate list only.  ``nilpotent`` defaults to an exact check.
    """
    if nilpotent is None:
        nilpotent = bool(is_nilpotent(N))
    which = resolve_backend(backend)
    sys = compile_system(_shift(N, minus_identity=True))
    starts = random_starts(seed, seeds, N.dim)
    if continuation:
        end = _track_homotopy(N)
        if end is not None:
            starts = np.vstack([starts, end[None, :]])
    pts, ok, _ = newton_multistart(sys, starts, tol=tol, max_iter=max_iter, backend=which)
    clusters = _confirm(_shift(N, minus_identity=True), _cluster(pts, ok, dedup_radius), dedup_radius)
    for c in clusters:
        if not c.confirmed:
            continue
        cand = reconstruct_point(c.refined, denominator_bound)
        if cand is not None and fixed_point_verify(N, cand):
            c.exact = cand
    return FixedPointSearch(clusters, seeds, int(ok.sum()), nilpotent, which, tol, dedup_radius)


@dataclass
class DegreeEstimate:
    """Heuristic lower bound on the geometric degree; never an exact value."""
    lower_bound: int
    counts: list[int] = field(default_factory=list)
    targets: list[tuple] = field(default_factory=list)
    heuristic: bool = True

    def __int__(self):
        return self.lower_bound


def degree_estimate(F: PolyMap, targets: int = 3, seeds: int = 32, seed: int = 0,
                    tol: float = DEFAULT_TOL, dedup_radius: float = DEFAULT_DEDUP,
                    max_iter: int = 100, backend: str = "auto") -> DegreeEstimate:
    """Largest number of distinct numeric preimages over random rational targets."""
    rng = random.Random(seed)
    counts, chosen = [], []
    for k in range(targets):
        c = tuple(GaussianRational(Fraction(rng.randint(-9, 9), rng.randint(1, 5)),
                                   Fraction(rng.randint(-9, 9), rng.randint(1, 5)))
                  for _ in range(F.dim))
        sys = compile_system(_shift(F, target=c))
        starts = random_starts(seed * 1009 + k, seeds, F.dim)
        pts, ok, _ = newton_multistart(sys, starts, tol=tol, max_iter=max_iter, backend=backend)
        counts.append(len(_cluster(pts, ok, dedup_radius)))
        chosen.append(c)
    return DegreeEstimate(max(counts, default=0), counts, chosen)
