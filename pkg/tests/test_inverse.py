import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilmap.automorphisms import tame_generator
from nilmap.errors import PreconditionError
from nilmap.inverse import default_cap, formal_inverse, invert_keller, verify_inverse
from nilmap.pmap import parse_pmap
from nilmap.polymap import PolyMap


def M(text):
    return parse_pmap(text).to_polymap()


def test_triangular_inverse():
    r = formal_inverse(M("vars x y\neq x + y^2\neq y"), 4)
    assert r.converged and r.inverse == M("vars x y\neq x - y^2\neq y")


def test_identity_inverse():
    ident = PolyMap.identity(("x", "y"))
    assert formal_inverse(ident, 1).inverse == ident


def test_non_keller_rejected():
    with pytest.raises(PreconditionError):
        formal_inverse(M("vars x\neq x - x^3"))


def test_cap_too_small_reports_not_converged():
    F = M("vars x y z\neq x + y^2\neq y + z^2\neq z")  # inverse has degree 4
    r = formal_inverse(F, 2)
    assert not r.converged and r.degree_reached == 2
    assert formal_inverse(F, 4).converged


@pytest.mark.parametrize("f,g,ok", [
    ("vars x y\neq x + y^2\neq y", "vars x y\neq x - y^2\neq y", True),
    ("vars x y\neq x\neq y", "vars x y\neq x\neq y", True),
    ("vars x y\neq x + y^2\neq y", "vars x y\neq x\neq y", False),
])
def test_verify_inverse(f, g, ok):
    assert bool(verify_inverse(M(f), M(g))) == ok


def test_default_cap():
    assert default_cap(M("vars x y z\neq x + y^2\neq y\neq z")) == 5


def test_invert_keller_normalizes():
    F = M("vars x y\neq 2*x + y^2 + 3\neq y - 1")
    r = invert_keller(F)
    assert r.converged and verify_inverse(F, r.inverse)


@settings(max_examples=25)
@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(0, 3))
def test_tame_maps_invert(seed, n, steps):
    F = tame_generator(seed, n, steps, 2).as_polymap()
    r = invert_keller(F)
    assert r.converged and verify_inverse(F, r.inverse)
