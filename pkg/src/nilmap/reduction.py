"""Blow-up, T-power elimination and the reduction of a Keller map to Id - N.

The elimination works on maps of the shape

    (x_1 - T*P_1 - T^2*P_2 - ..., ..., x_m - ..., T)

with T the last variable.  Each step takes the component with the highest
power T^k, introduces a fresh coordinate u placed just before T, and uses two
triangular changes of coordinates to replace the summand T^k*P_k by
T^(k-1)*u while adding the component u - T*P_k.  Every step lowers
sum_i max(0, tdeg_i - 1) by exactly one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import exactlinalg
from .automorphisms import (Composition, EquivalenceWitness, Linear, Translation, Triangular,
                            default_ring, verify_witness)
from .errors import InvariantBreach, PreconditionError
from .nilpotency import NilpotencyResult, is_nilpotent, lemma1_bridge
from .polymap import PolyMap, compose, determinant, fresh_names, is_keller, jacobian
from .polynomial import Polynomial
from .scalars import ONE, ZERO, as_gr

__all__ = [
    "blow_up", "restrict_t", "eliminate_t_powers", "to_nilpotent_form", "t_measure",
    "EliminationResult", "ReductionReport", "extend_before_t", "normalize_keller",
]


def blow_up(F: PolyMap, t_name: str = "t") -> PolyMap:
    """(sum_j T^(j-1) F_(j)i(X), ..., T) for F with F(0) = 0."""
    for i, p in enumerate(F.components):
        if not p.constant_term().is_zero():
            raise PreconditionError(f"component {i} has a nonzero constant term; blow-up needs F(0) = 0")
    if t_name in F.ring:
        raise PreconditionError(f"variable name {t_name!r} already used")
    ring = F.ring + (t_name,)
    comps = []
    for p in F.components:
        terms = {m + (sum(m) - 1,): c for m, c in p.terms.items()}
        comps.append(Polynomial(ring, terms))
    comps.append(Polynomial.var(ring, len(F.ring)))
    return PolyMap(comps, ring)


def restrict_t(Ft: PolyMap, value=1) -> PolyMap:
    """Set the last variable to ``value`` and drop the last component."""
    ring = Ft.ring[:-1]
    images = Polynomial.variables(ring) + [Polynomial.constant(ring, value)]
    return PolyMap([p.substitute(images) for p in Ft.components[:-1]], ring)


def _tdeg(p: Polynomial, t: int) -> int:
    return p.degree_in(t)


def t_measure(F: PolyMap) -> int:
    """sum over non-T components of max(0, T-degree - 1)."""
    t = F.dim - 1
    return sum(max(0, _tdeg(p, t) - 1) for p in F.components[:-1])


def _check_preform(F: PolyMap):
    t = F.dim - 1
    if F.dim < 1 or F.components[-1] != Polynomial.var(F.ring, t):
        raise PreconditionError("last component must be exactly the last variable T")
    for i, p in enumerate(F.components[:-1]):
        rest = p - Polynomial.var(F.ring, i)
        if any(m[t] == 0 for m in rest.terms):
            raise PreconditionError(
                f"component {i} is not x_{i + 1} plus terms divisible by T")


def extend_before_t(F: PolyMap, names: Sequence[str]) -> PolyMap:
    """F x Id with the new identity coordinates placed just before the last variable."""
    names = tuple(names)
    if not names:
        return F
    if set(names) & set(F.ring):
        raise PreconditionError(f"variable name collision: {sorted(set(names) & set(F.ring))}")
    m = F.dim - 1
    ring = F.ring[:m] + names + F.ring[m:]
    positions = list(range(m)) + [m + len(names)]
    comps = [p.embed(ring, positions) for p in F.components[:m]]
    comps += [Polynomial.var(ring, m + k) for k in range(len(names))]
    comps.append(F.components[m].embed(ring, positions))
    return PolyMap(comps, ring)


@dataclass
class EliminationResult:
    result: PolyMap
    witness: EquivalenceWitness
    added: tuple[str, ...]
    measures: list[int]
    G: PolyMap
    steps: list[dict] = field(default_factory=list)
    extended_input: PolyMap | None = None

    def measure_strictly_decreasing(self) -> bool:
        return all(a > b for a, b in zip(self.measures, self.measures[1:]))


def eliminate_t_powers(F: PolyMap) -> EliminationResult:
    """Remove every power T^k, k > 1, by adding coordinates.

    Returns the map (x_i - T*G_i(x), ..., T), a witness relating it to F
    extended by identity coordinates (inserted before T), the measure after
    each step, and the extracted G.
    """
    _check_preform(F)
    original = F
    ring = F.ring
    comps = list(F.components)
    added: list[str] = []
    measures = [t_measure(F)]
    step_witnesses = []
    steps = []
    while True:
        m = len(ring) - 1           # T sits at index m
        tdegs = [_tdeg(p, m) for p in comps[:m]]
        k = max(tdegs, default=0)
        if k <= 1:
            break
        i = tdegs.index(k)
        top = -comps[i].coefficient_of_power(m, k)        # P_k, T-free
        name = fresh_names(ring + tuple(added), 1)[0]
        new_ring = ring[:m] + (name,) + ring[m:]
        positions = list(range(m)) + [m + 1]
        comps = [p.embed(new_ring, positions) for p in comps]
        top = top.embed(new_ring, positions)
        t = Polynomial.var(new_ring, m + 1)
        u = Polynomial.var(new_ring, m)
        comps[i] = comps[i] + t ** k * top - t ** (k - 1) * u
        comps.insert(m, u - t * top)
        added.append(name)
        ring = new_ring

        # preimage side: u -> u - T*P_k ; image side: y_i -> y_i + T^(k-1) * y_u
        dim = len(ring)
        zero = Polynomial.zero(default_ring(dim))
        h_shifts = [zero] * dim
        h_shifts[m] = -(t * top).relabel(default_ring(dim))
        h_order = list(range(m)) + [m + 1, m]
        r_shifts = [zero] * dim
        r_shifts[i] = (t ** (k - 1) * u).relabel(default_ring(dim))
        r_order = [m, m + 1] + [j for j in range(m) if j != i] + [i]
        step_witnesses.append(EquivalenceWitness(Triangular(h_shifts, h_order),
                                                 Triangular(r_shifts, r_order)))
        cur = PolyMap(comps, ring)
        measures.append(t_measure(cur))
        steps.append({"component": i, "power": k, "new_variable": name})
        if measures[-1] >= measures[-2]:
            raise InvariantBreach(f"elimination measure did not decrease: {measures[-2:]}")

    result = PolyMap(comps, ring)
    final_dim = len(ring)
    hs, rs = [], []
    for w in step_witnesses:
        pad = final_dim - w.H.dim
        if pad:
            w = w.insert_identity(w.H.dim - 1, pad)
        hs.append(w.H)
        rs.append(w.R)
    witness = EquivalenceWitness(Composition(hs, final_dim), Composition(rs, final_dim))

    m = final_dim - 1
    g_ring = ring[:m]
    keep = list(range(m))
    G = []
    for j in range(m):
        rest = Polynomial.var(ring, j) - comps[j]
        gj = rest.coefficient_of_power(m, 1)
        if gj * Polynomial.var(ring, m) != rest:
            raise InvariantBreach(f"component {j} is not of the form x - T*G after elimination")
        G.append(gj.drop_variables(g_ring, keep))
    return EliminationResult(result, witness, tuple(added), measures, PolyMap(G, g_ring), steps,
                             extend_before_t(original, added))


def normalize_keller(F: PolyMap, base_point=None):
    """Affine normalization F_norm = L^-1 (F(x + b) - F(b)), L = JF(b).

    Returns (F_norm, witness) with R o F_norm = F o H.  F_norm sends 0 to 0,
    has identity linear part and Keller constant 1.
    """
    n = F.dim
    b = [ZERO] * n if base_point is None else [as_gr(v) for v in base_point]
    if len(b) != n:
        raise PreconditionError("base point has the wrong length")
    Fb = list(F.evaluate(b))
    J = jacobian(F)
    L = [[J[i, j].evaluate(b) for j in range(n)] for i in range(n)]
    if exactlinalg.det(L).is_zero():
        raise PreconditionError("Jacobian is singular at the base point")
    shift = Translation(b).as_polymap(F.ring)
    shifted = compose(F, shift)
    centered = PolyMap([p - c for p, c in zip(shifted.components, Fb)], F.ring)
    L_inv = Linear(exactlinalg.inverse(L))
    F_norm = compose(L_inv.as_polymap(F.ring), centered)
    witness = EquivalenceWitness(Translation(b), Composition([Translation(Fb), Linear(L)]))
    return F_norm, witness


@dataclass
class ReductionReport:
    N: PolyMap
    nilpotency: NilpotencyResult
    links: list[dict]
    added_dims: int
    measures: list[int]
    keller_constant: object
    base_point: list
    notes: list[str]
    normalized: PolyMap = None
    blown_up: PolyMap = None
    eliminated: PolyMap = None
    normalization_witness: EquivalenceWitness = None
    elimination_witness: EquivalenceWitness = None

    def all_links_verified(self) -> bool:
        return all(link["verified"] for link in self.links)


def to_nilpotent_form(F: PolyMap, base_point=None, verify: bool = True) -> ReductionReport:
    """Keller map F -> nilpotent N with F stably equivalent to Id - N.

    Stages: affine normalization, blow-up, T-power elimination, extraction
    of N.  Every stage is replayed exactly when ``verify`` is set.
    """
    keller = is_keller(F)
    if not keller:
        raise PreconditionError(f"not a Keller map: det JF = {keller.determinant.to_text()}")
    notes = ["preimage-count genericity at the base point is assumed, not checked"]
    links = []

    F_norm, w_norm = normalize_keller(F, base_point)
    if verify:
        ok = verify_witness(w_norm, F, F_norm)
        links.append({"stage": "normalize", "verified": ok, "witness": w_norm.to_record()})
        if not ok:
            raise InvariantBreach("normalization witness does not replay")
    if any(not p.constant_term().is_zero() for p in F_norm.components) or \
            F_norm.homogeneous_part(1) != PolyMap.identity(F_norm.ring):
        raise InvariantBreach("normalization did not produce x + higher-order terms")

    t_name = "t" if "t" not in F.ring else fresh_names(F.ring, 1, prefix="t")[0]
    Ft = blow_up(F_norm, t_name)
    if verify:
        restr_ok = restrict_t(Ft) == F_norm
        det_ok = True
        if F.dim <= 4:
            ring = Ft.ring
            n = F.dim
            tx = [Polynomial.var(ring, n) * Polynomial.var(ring, j) for j in range(n)]
            lhs = determinant(jacobian(Ft))
            rhs = determinant(jacobian(F_norm)).substitute(tx)
            det_ok = lhs == rhs
        links.append({"stage": "blow_up", "verified": restr_ok and det_ok,
                      "restriction_ok": restr_ok, "jacobian_identity_ok": det_ok})
        if not (restr_ok and det_ok):
            raise InvariantBreach("blow-up identities fail")

    elim = eliminate_t_powers(Ft)
    if verify:
        ok = verify_witness(elim.witness, elim.extended_input, elim.result)
        links.append({"stage": "eliminate", "verified": ok, "added": list(elim.added),
                      "measures": elim.measures, "witness": elim.witness.to_record()})
        if not ok:
            raise InvariantBreach("elimination witness does not replay")
    N = elim.G
    bridge_ok = lemma1_bridge(N, t_name) == elim.result
    nil = is_nilpotent(N)
    links.append({"stage": "extract", "verified": bridge_ok and bool(nil),
                  "bridge_matches": bridge_ok, "nilpotent": bool(nil)})
    if not bridge_ok:
        raise InvariantBreach("eliminated map is not (Id - T*N) x Id")
    if not nil:
        raise InvariantBreach("extracted map is not nilpotent")
    b = [ZERO] * F.dim if base_point is None else [as_gr(v) for v in base_point]
    return ReductionReport(
        N=N, nilpotency=nil, links=links, added_dims=len(elim.added), measures=elim.measures,
        keller_constant=keller.constant, base_point=b, notes=notes, normalized=F_norm,
        blown_up=Ft, eliminated=elim.result, normalization_witness=w_norm,
        elimination_witness=elim.witness)
