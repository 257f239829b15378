import os
import random
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilmap._newton import compile_system, newton_multistart, numba_enabled, random_starts
from nilmap.fixedpoints import (degree_estimate, fixed_point_search, fixed_point_verify,
                                reconstruct_point, triangular_fixed_solve)
from nilmap.fuzz import generate_nilpotent
from nilmap.pmap import parse_pmap
from nilmap.polymap import PolyMap
from nilmap.scalars import GaussianRational


def M(text):
    return parse_pmap(text).to_polymap()


Y2 = "vars x y\neq y^2\neq 0"


@pytest.mark.parametrize("pt,ok", [((0, 0), True), ((1, 0), False)])
def test_verify_examples(pt, ok):
    assert fixed_point_verify(M(Y2), pt) == ok


def test_verify_triangular_constant():
    assert fixed_point_verify(M("vars x y\neq y^3 - y + 5\neq 0"), (5, 0))


def test_search_unique_origin():
    res = fixed_point_search(M(Y2), seeds=64, tol=1e-10)
    assert len(res.clusters) == 1
    assert res.exact == [(GaussianRational(0), GaussianRational(0))]
    assert not res.violation


def test_search_zero_map():
    res = fixed_point_search(M("vars x y\neq 0\neq 0"))
    assert res.exact == [(0, 0)]


def test_search_non_nilpotent_finds_two():
    res = fixed_point_search(M("vars x\neq x^2"), seeds=32)
    assert {p[0] for p in res.exact} == {GaussianRational(0), GaussianRational(1)}
    assert not res.nilpotent and not res.violation


def test_search_plane_curve_non_nilpotent():
    res = fixed_point_search(M("vars x y\neq x^2\neq y"), seeds=32)
    xs = {complex(c.point[0]).real.__round__(6) for c in res.clusters}
    assert {0.0, 1.0} <= xs


def test_triangular_solve_examples():
    assert triangular_fixed_solve(M(Y2)) == [(0, 0)]
    assert triangular_fixed_solve(M("vars x1 x2\neq 3\neq x1^2")) == [(3, 9)]
    assert triangular_fixed_solve(M("vars x y\neq x^2\neq y")) is None


def test_degree_estimates():
    assert int(degree_estimate(M("vars x y\neq x + y^2\neq y"))) == 1
    assert int(degree_estimate(PolyMap.identity(("x", "y")))) == 1
    assert int(degree_estimate(M("vars x y\neq x^2\neq y"))) == 2


def test_reconstruct_rational():
    assert reconstruct_point([0.5 + 0.25j, -3.0]) == (GaussianRational(Fraction(1, 2), Fraction(1, 4)),
                                                      GaussianRational(-3))
    assert reconstruct_point([0.1234567891234]) is None


@pytest.mark.skipif(not numba_enabled(), reason="numba disabled")
def test_backends_agree():
    N, _ = generate_nilpotent("conjugated-triangular", 3, 3, random.Random(5))
    sys_ = compile_system(N - PolyMap.identity(N.ring))
    starts = random_starts(1, 16, 3)
    a = newton_multistart(sys_, starts, backend="numba")
    b = newton_multistart(sys_, starts, backend="numpy")
    assert np.array_equal(a[1], b[1])
    np.testing.assert_allclose(a[0][a[1]], b[0][b[1]], rtol=1e-9, atol=1e-12)


def test_env_flag_selects_numpy():
    code = "from nilmap._newton import resolve_backend; print(resolve_backend('auto'))"
    env = dict(os.environ, NILMAP_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.strip() == "numpy"


@settings(max_examples=20)
@given(st.integers(0, 10**6), st.integers(1, 4), st.integers(1, 3))
def test_search_matches_triangular_oracle(seed, n, deg):
    N, _ = generate_nilpotent("strict-triangular", n, deg, random.Random(seed))
    res = fixed_point_search(N, seeds=16, seed=seed)
    assert res.exact == triangular_fixed_solve(N)
