"""Acceptance suite: nine end-to-end criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline, or
directly with ``python tests/test_acceptance.py``.
"""

import io
import os
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from oracles import charpoly_nilpotent  # noqa: E402
from nilmap.automorphisms import (Linear, default_ring, random_polynomial,  # noqa: E402
                                  tame_generator, verify_witness)
from nilmap.cli import run_command  # noqa: E402
from nilmap.fuzz import FAMILIES, VIOLATION, fuzz_jn, generate_nilpotent  # noqa: E402
from nilmap.inverse import default_cap, invert_keller, verify_inverse  # noqa: E402
from nilmap.nilpotency import (closed_form_eigenvalue, euler_identity_check,  # noqa: E402
                               is_nilpotent, is_nilpotent_matrix, lemma1_bridge,
                               two_form_identity_check)
from nilmap.pmap import parse_pmap, print_pmap  # noqa: E402
from nilmap.polymap import (PolyMap, PolyMatrix, compose, determinant, jacobian,  # noqa: E402
                            p_degree, realify, realify_polynomial)
from nilmap.polynomial import Polynomial  # noqa: E402
from nilmap.reduction import blow_up, restrict_t, to_nilpotent_form  # noqa: E402
from nilmap.scalars import ExtensionScalar, GaussianRational  # noqa: E402

CORPUS = Path(__file__).parent / "corpus"
INVERSE_DEGREE_BUDGET = 9


def _line(number, title, ok, detail, seconds):
    tag = "PASS" if ok else "FAIL"
    return f"[{tag}] criterion {number}: {title} -- {detail} ({seconds:.1f}s)"


def _emit(capsys, text):
    if capsys is None:
        print(text)
    else:
        with capsys.disabled():
            print("\n" + text)


def _random_map(rng, n, deg, constant=True, complex_coeffs=False):
    ring = default_ring(n)
    comps = []
    for _ in range(n):
        p = random_polynomial(rng, ring, list(range(n)), 0 if constant else 1, deg,
                              max_terms=3, coeff_bound=3)
        if complex_coeffs:
            p = p + random_polynomial(rng, ring, list(range(n)), 1, deg, max_terms=2).scale(
                GaussianRational(0, 1))
        comps.append(p)
    return PolyMap(comps, ring)


# 1 ------------------------------------------------------------------------------

def criterion_1():
    rng = random.Random("acceptance-1")
    bad = nil_count = 0
    for idx in range(200):
        n = rng.randint(1, 4)
        deg = rng.randint(1, 3)
        if idx % 2 == 0:
            family = rng.choice(FAMILIES if deg >= 2 else FAMILIES[:3])
            N, _ = generate_nilpotent(family, n, deg, rng)
        else:
            N = _random_map(rng, n, deg)
        nil = bool(is_nilpotent(N))
        unit = determinant(jacobian(lemma1_bridge(N))) == 1
        nil_count += nil
        bad += nil != unit
    return bad == 0, f"200 maps, {nil_count} nilpotent, {bad} disagreements"


# 2 ------------------------------------------------------------------------------

def criterion_2():
    rng = random.Random("acceptance-2")
    bad = 0
    for _ in range(100):
        n = rng.randint(1, 3)
        F = _random_map(rng, n, rng.randint(1, 4), constant=False)
        Ft = blow_up(F)
        t = Polynomial.var(Ft.ring, n)
        tx = [t * Polynomial.var(Ft.ring, j) for j in range(n)]
        det_ok = determinant(jacobian(Ft)) == determinant(jacobian(F)).substitute(tx)
        bad += not (det_ok and restrict_t(Ft) == F)
    return bad == 0, f"100 maps, {bad} failures"


# 3 ------------------------------------------------------------------------------

def criterion_3():
    rng = random.Random("acceptance-3")
    bad = 0
    added = 0
    degrees = []
    tries = 0
    while len(degrees) < 50:
        # redraw affine maps: they reduce to N = 0 without exercising anything
        tries += 1
        F = tame_generator(f"acceptance-3/{tries}", rng.randint(2, 3), rng.randint(1, 4), 2).as_polymap()
        if p_degree(F) < 2:
            continue
        degrees.append(p_degree(F))
        rep = to_nilpotent_form(F)
        measures = rep.measures
        steps_ok = all(measures[k] > measures[k + 1] for k in range(len(measures) - 1))
        ok = bool(is_nilpotent(rep.N)) and rep.all_links_verified() and steps_ok
        ok = ok and verify_witness(rep.normalization_witness, F, rep.normalized)
        added += rep.added_dims
        bad += not ok
    return bad == 0, (f"50 nonlinear tame maps (deg_p up to {max(degrees)}), {added} coordinates "
                      f"added in total, {bad} failures")


# 4 ------------------------------------------------------------------------------

def _homogeneous_map(rng, n, k):
    ring = default_ring(n)
    return PolyMap([random_polynomial(rng, ring, list(range(n)), k, k, max_terms=3)
                    if rng.random() < 0.85 else Polynomial.zero(ring) for _ in range(n)], ring)


def criterion_4():
    rng = random.Random("acceptance-4")
    failures = []
    for k in (2, 3, 4):
        for _ in range(100):
            if not euler_identity_check(_homogeneous_map(rng, rng.randint(1, 4), k), k):
                failures.append(f"euler k={k}")
    for k1, k2 in ((1, 2), (1, 3), (2, 3)):
        for _ in range(100):
            n = rng.randint(1, 4)
            if not two_form_identity_check(_homogeneous_map(rng, n, k1), _homogeneous_map(rng, n, k2),
                                           k1, k2):
                failures.append(f"two-form {k1},{k2}")
    eig = closed_form_eigenvalue(2, 3)
    if eig != ExtensionScalar.embed(Fraction(4, 3), 1, Fraction(2, 3)):
        failures.append("eigenvalue (2,3)")
    ok = not failures
    return ok, "300 Euler maps, 300 two-form pairs, eigenvalue(2,3) = 4/3" if ok else ", ".join(failures[:5])


# 5 ------------------------------------------------------------------------------

def _random_matrix(rng, size, ring, nilpotent):
    nv = len(ring)

    def entry(p_zero=0.3):
        if rng.random() < p_zero:
            return Polynomial.zero(ring)
        return random_polynomial(rng, ring, list(range(nv)), 0, 2, max_terms=2)

    if not nilpotent:
        return PolyMatrix([[entry() for _ in range(size)] for _ in range(size)], ring)
    zero = Polynomial.zero(ring)
    upper = PolyMatrix([[entry() if j > i else zero for j in range(size)] for i in range(size)], ring)
    while True:
        rows = [[rng.randint(-2, 2) for _ in range(size)] for _ in range(size)]
        try:
            L = Linear(rows)
            break
        except ValueError:
            continue
    P = PolyMatrix([[Polynomial.constant(ring, v) for v in row] for row in L.matrix], ring)
    Pinv = PolyMatrix([[Polynomial.constant(ring, v) for v in row] for row in L.inverse().matrix], ring)
    return P @ upper @ Pinv


def criterion_5():
    rng = random.Random("acceptance-5")
    ring = ("x", "y")
    bad = nil_count = 0
    for idx in range(200):
        size = rng.randint(1, 4)
        kind = idx % 3
        if kind == 2:
            N, _ = generate_nilpotent(rng.choice(FAMILIES[:3]), max(size, 2), 2, rng)
            M = jacobian(N)
        else:
            M = _random_matrix(rng, size, ring, nilpotent=(kind == 0))
        fast = bool(is_nilpotent_matrix(M))
        nil_count += fast
        bad += fast != charpoly_nilpotent(M.entries)
    mixed = 0 < nil_count < 200
    return bad == 0 and mixed, f"200 matrices, {nil_count} nilpotent, {bad} disagreements"


# 6 ------------------------------------------------------------------------------

def criterion_6():
    rng = random.Random("acceptance-6")
    total = ok = low = low_ok = 0
    tries = skipped = 0
    while total < 50:
        tries += 1
        n = rng.randint(2, 4)
        a = tame_generator(f"acceptance-6/{tries}", n, rng.randint(1, 4), rng.randint(2, 3))
        F = a.as_polymap()
        # desk-scale budget: exact F o G costs grow like deg F * deg G
        if not 2 <= p_degree(F) <= 3:
            continue
        if p_degree(a.inverse().as_polymap()) > INVERSE_DEGREE_BUDGET:
            skipped += 1
            continue
        total += 1
        r = invert_keller(F, default_cap(F))
        good = r.converged and bool(verify_inverse(F, r.inverse))
        ok += good
        if p_degree(F) <= 2:
            low += 1
            low_ok += good
    passed = ok == total and low_ok == low and low > 0
    return passed, (f"{ok}/{total} nonlinear maps inverted (deg_p = 2: {low_ok}/{low}; "
                    f"{skipped} draws over the inverse-degree budget skipped)")


# 7 ------------------------------------------------------------------------------

def criterion_7():
    rng = random.Random("acceptance-7")
    bad = 0
    for _ in range(50):
        F = _random_map(rng, rng.randint(1, 2), rng.randint(1, 3), complex_coeffs=True)
        re, im = realify_polynomial(determinant(jacobian(F)))
        bad += determinant(jacobian(realify(F))) != re * re + im * im
    return bad == 0, f"50 complex maps, {bad} failures"


# 8 ------------------------------------------------------------------------------

def _fuzz_plan():
    combos = [(fam, n, deg) for fam in FAMILIES for n in (2, 3, 4) for deg in (1, 2, 3)
              if not (fam == "two-form" and deg < 2)]
    base, extra = divmod(500, len(combos))
    return [(fam, n, deg, base + (k < extra)) for k, (fam, n, deg) in enumerate(combos)]


def criterion_8():
    maps = violations = multi = unrecon = mismatch = 0
    for fam, n, deg, count in _fuzz_plan():
        rep = fuzz_jn(fam, n, deg, count, seed=7, seeds=64)
        maps += rep.verdicts["maps"]
        violations += sum(1 for e in rep.events if e["event"] == VIOLATION)
        unrecon += rep.verdicts["unreconstructed"]
        mismatch += rep.verdicts.get("oracle_mismatches", 0)
        multi += sum(1 for w in rep.witnesses if len(w["exact"]) > 1)
    ok = maps == 500 and violations == 0 and multi == 0 and mismatch == 0
    return ok, (f"{maps} maps, {violations} violations, {multi} with >1 exact point, "
                f"{unrecon} unreconstructed, {mismatch} oracle mismatches")


# 9 ------------------------------------------------------------------------------

def _digest(argv):
    code, rep = run_command([str(a) for a in argv], io.StringIO(), io.StringIO())
    return rep.determinism_digest() if rep is not None else None


def criterion_9():
    files = sorted(CORPUS.glob("*.pmap"))
    bad = []
    for f in files:
        text = f.read_text()
        doc = parse_pmap(text)
        if print_pmap(doc) != text or parse_pmap(print_pmap(doc)) != doc:
            bad.append(f.name)
    runs = [("fuzz", "--family", fam, "--n", 3, "--deg", 2, "--count", 5, "--seed", 3)
            for fam in FAMILIES]
    runs += [("fixed-points", CORPUS / "two_form.pmap", "--seed", 5),
             ("reduce", CORPUS / "pdeg3.pmap"),
             ("check", "nilpotent", CORPUS / "squares.pmap")]
    nondeterministic = [r[0] for r in runs if _digest(r) != _digest(r) or _digest(r) is None]
    ok = len(files) >= 30 and not bad and not nondeterministic
    detail = f"{len(files)} corpus files round-trip, {len(runs)} commands digest-stable"
    if not ok:
        detail = f"round-trip failures {bad}, unstable {nondeterministic}"
    return ok, detail


CRITERIA = [
    (1, "nilpotent iff bridge determinant is 1", criterion_1),
    (2, "blow-up Jacobian identity and restriction", criterion_2),
    (3, "tame Keller maps reduce to nilpotent form", criterion_3),
    (4, "Euler and two-form identities", criterion_4),
    (5, "trace test agrees with characteristic polynomial", criterion_5),
    (6, "formal inversion of tame Keller maps", criterion_6),
    (7, "realification determinant identity", criterion_7),
    (8, "fixed-point fuzzing of nilpotent maps", criterion_8),
    (9, "corpus round-trip and digest determinism", criterion_9),
]


def _run(number, title, fn, capsys=None):
    t0 = time.perf_counter()
    ok, detail = fn()
    _emit(capsys, _line(number, title, ok, detail, time.perf_counter() - t0))
    return ok


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, title, fn, capsys):
    assert _run(number, title, fn, capsys)


if __name__ == "__main__":
    results = [_run(*c) for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
