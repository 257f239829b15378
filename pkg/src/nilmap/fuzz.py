"""Seeded fuzzing of the one-fixed-point property of nilpotent maps."""

from __future__ import annotations

import random
import time

from .automorphisms import Composition, Translation, _random_linear, default_ring, random_polynomial
from .errors import InvariantBreach, PreconditionError
from .fixedpoints import fixed_point_search, triangular_fixed_solve
from .nilpotency import is_nilpotent
from .pmap import print_pmap
from .polymap import PolyMap, compose
from .polynomial import Polynomial
from .report import RunReport

FAMILIES = ("strict-triangular", "conjugated-triangular", "homogeneous", "two-form")
VIOLATION = "CONJECTURE VIOLATION"

__all__ = ["FAMILIES", "VIOLATION", "generate_nilpotent", "fuzz_jn"]


def _strict_triangular(rng, n, degrees, constants=True) -> PolyMap:
    """Component i uses only x_{i+1}..x_n; small coefficients keep fixed points in double range."""
    ring = default_ring(n)
    comps = []
    for i in range(n):
        later = list(range(i + 1, n))
        p = Polynomial.zero(ring)
        for k in degrees:
            p = p + random_polynomial(rng, ring, later, k, k, max_terms=2, coeff_bound=2)
        if constants:
            p = p + rng.randint(-1, 1)
        comps.append(p)
    return PolyMap(comps, ring)


def _conjugate(rng, N: PolyMap, affine: bool) -> PolyMap:
    n = N.dim
    factors = [_random_linear(rng, n, bound=1)]
    if affine:
        factors.append(Translation([rng.randint(-1, 1) for _ in range(n)]))
    A = Composition(factors, n)
    ring = N.ring
    return compose(A.inverse().as_polymap(ring), compose(N, A.as_polymap(ring)))


def _random_homogeneous(rng, n, k) -> PolyMap:
    ring = default_ring(n)
    return PolyMap([random_polynomial(rng, ring, list(range(n)), k, k, max_terms=1, coeff_bound=2)
                    if rng.random() < 0.7 else Polynomial.zero(ring) for _ in range(n)], ring)


def generate_nilpotent(family: str, n: int, deg: int, rng: random.Random) -> tuple[PolyMap, str]:
    """One map of the family and a tag describing how it was built."""
    if family not in FAMILIES:
        raise PreconditionError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if n < 1 or deg < 1:
        raise PreconditionError("n and deg must be positive")
    if family == "strict-triangular":
        return _strict_triangular(rng, n, range(1, deg + 1)), "triangular"
    if family == "conjugated-triangular":
        return _conjugate(rng, _strict_triangular(rng, n, range(1, deg + 1)), True), "affine-conjugate"
    if family == "homogeneous":
        k = rng.randint(min(2, deg), deg)
        if rng.random() < 0.5:
            for _ in range(8):
                cand = _random_homogeneous(rng, n, k)
                if is_nilpotent(cand):
                    return cand, f"filtered-random k={k}"
        return _conjugate(rng, _strict_triangular(rng, n, [k], False), False), f"linear-conjugate k={k}"
    if deg < 2:
        raise PreconditionError("the two-form family needs deg >= 2")
    k2 = rng.randint(2, deg)
    k1 = rng.randint(1, k2 - 1)
    T = _strict_triangular(rng, n, [k1, k2], False)
    return _conjugate(rng, T, False), f"linear-conjugate k1={k1} k2={k2}"


def _point_text(pt):
    return [str(v) for v in pt]


def fuzz_jn(family: str, n: int, deg: int, count: int, seed: int, seeds: int = 64,
            tol: float = 1e-10, backend: str = "auto") -> RunReport:
    """Generate ``count`` nilpotent maps and look for more than one fixed point."""
    rng = random.Random(f"{family}/{n}/{deg}/{seed}")
    report = RunReport("fuzz", seed=seed, parameters={
        "family": family, "n": n, "deg": deg, "count": count, "seeds": seeds, "tol": tol})
    t0 = time.perf_counter()
    maps = []
    unique = no_exact = mismatches = 0
    for idx in range(count):
        N, tag = generate_nilpotent(family, n, deg, rng)
        if not is_nilpotent(N):
            raise InvariantBreach(f"generated map #{idx} of family {family} is not nilpotent")
        res = fixed_point_search(N, seeds=seeds, tol=tol, seed=seed * 1_000_003 + idx,
                                 nilpotent=True, backend=backend)
        text = print_pmap(N)
        exact = res.exact
        entry = {
            "index": idx, "source": tag, "map": text, "clusters": len(res.clusters),
            "converged": res.converged, "exact": [_point_text(p) for p in exact],
            "approximate": [list(c.point) for c in res.clusters],
        }
        if family == "strict-triangular":
            oracle = triangular_fixed_solve(N)
            match = oracle is not None and exact == oracle and len(res.clusters) == 1
            entry["oracle"] = [_point_text(p) for p in oracle] if oracle else None
            entry["oracle_match"] = match
            mismatches += not match
        if not exact:
            no_exact += 1
        elif len(exact) == 1:
            unique += 1
        if res.violation:
            report.events.append({"event": VIOLATION, "index": idx, "map": text,
                                  "points": [_point_text(p) for p in exact]})
        maps.append(entry)
    report.verdicts = {
        "maps": count, "violations": len(report.events), "unique_verified": unique,
        "unreconstructed": no_exact,
    }
    if family == "strict-triangular":
        report.verdicts["oracle_mismatches"] = mismatches
    report.witnesses = maps
    report.timings["total"] = time.perf_counter() - t0
    return report
