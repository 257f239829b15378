import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import RING2, polymaps, polynomials, rationals
from oracles import cofactor_det, substitute_by_evaluation
from nilmap.errors import DimensionError
from nilmap.pmap import parse_pmap
from nilmap.polymap import (PolyMap, PolyMatrix, compose, determinant, is_keller, jacobian,
                            p_degree, realify, realify_polynomial, stable_extend)
from nilmap.polynomial import Polynomial
from nilmap.reduction import blow_up


def M(text):
    return parse_pmap(text).to_polymap()


def test_jacobian_triangular():
    J = jacobian(M("vars x y\neq x + y^2\neq y"))
    assert J == PolyMatrix([[1, M("vars x y\neq 2*y\neq 0").components[0]], [0, 1]], RING2)


def test_jacobian_nilpotent_example():
    J = jacobian(M("vars x y\neq y^2\neq 0"))
    assert J[0, 1] == Polynomial.var(RING2, 1).scale(2)
    assert J[0, 0].is_zero() and J[1, 0].is_zero() and J[1, 1].is_zero()


def test_identity_det():
    assert determinant(PolyMatrix.identity(4, ("a", "b", "c", "d"))) == 1


def test_char_poly_of_nilpotent_jacobian():
    N = M("vars x y\neq y^2\neq 0")
    ring = ("x", "y", "t")
    J = jacobian(N).map_entries(lambda p: p.embed(ring, [0, 1]), ring)
    t = Polynomial.var(ring, 2)
    tE = PolyMatrix([[t, 0], [0, t]], ring)
    assert determinant(tE - J) == t ** 2


def test_compose_to_identity():
    F = M("vars x y\neq x + y^2\neq y")
    G = M("vars x y\neq x - y^2\neq y")
    assert compose(F, G) == PolyMap.identity(RING2)


def test_p_degree():
    assert p_degree(M("vars x y\neq x + y^3\neq y")) == 3
    assert p_degree(blow_up(M("vars x\neq x - x^2 - x^3"))) == 5


def test_keller_negative_witness():
    r = is_keller(M("vars x y\neq x^2\neq y"))
    assert not r
    assert r.witness == Polynomial.var(RING2, 0).scale(2)


def test_keller_positive_constant():
    r = is_keller(M("vars x y\neq 2*x + y^2\neq y"))
    assert r and r.constant == 2


def test_stable_extend():
    E = stable_extend(M("vars x y\neq x + y^2\neq y"), 1, ["z"])
    assert E == M("vars x y z\neq x + y^2\neq y\neq z")


def test_realify_linear():
    R = realify(M("vars x\neq i*x"))
    u, v = Polynomial.variables(R.ring)
    assert list(R.components) == [-v, u]


def test_realify_square_det():
    R = realify(M("vars x\neq x^2"))
    u, v = Polynomial.variables(R.ring)
    assert determinant(jacobian(R)) == (u * u + v * v).scale(4)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        compose(M("vars x y\neq x\neq y"), M("vars x\neq x"))


# --- properties ---

@given(polymaps(max_deg=2), polymaps(max_deg=2))
def test_chain_rule(F, G):
    lhs = jacobian(compose(F, G))
    ring = F.ring
    rhs = jacobian(F).substitute(list(G.components)) @ jacobian(G)
    assert lhs == rhs
    assert lhs.shape == (len(ring), len(ring))


@given(polymaps(max_deg=2), polymaps(max_deg=2))
def test_compose_agrees_with_pointwise(F, G):
    pts = [[1, 2], [0, -1], [3, 1]]
    assert [compose(F, G).evaluate(p) for p in pts] == substitute_by_evaluation(F, G, pts)


@given(st.lists(polynomials(RING2, max_deg=2), min_size=9, max_size=9),
       st.lists(polynomials(RING2, max_deg=1), min_size=9, max_size=9))
def test_det_multiplicative(a, b):
    A = PolyMatrix([a[0:3], a[3:6], a[6:9]], RING2)
    B = PolyMatrix([b[0:3], b[3:6], b[6:9]], RING2)
    assert determinant(A @ B) == determinant(A) * determinant(B)


@given(st.integers(1, 4).flatmap(
    lambda n: st.lists(polynomials(RING2, max_deg=2, max_terms=2), min_size=n * n, max_size=n * n)))
def test_bareiss_matches_cofactor(entries):
    n = int(round(len(entries) ** 0.5))
    rows = [entries[i * n:(i + 1) * n] for i in range(n)]
    assert determinant(PolyMatrix(rows, RING2)) == cofactor_det(rows)


@given(polymaps(max_deg=2), st.integers(0, 2))
def test_stable_extend_det(F, k):
    E = stable_extend(F, k)
    assert E.dim == F.dim + k
    d = determinant(jacobian(F))
    assert determinant(jacobian(E)) == d.embed(E.ring, list(range(F.dim)))


@given(polymaps(ring=("x",), max_deg=3))
def test_realify_det_identity(F):
    P = determinant(jacobian(F))
    re, im = realify_polynomial(P)
    R = realify(F)
    assert determinant(jacobian(R)) == re * re + im * im


@given(polynomials(("x", "y"), max_deg=3))
def test_realify_is_real(p):
    re, im = realify_polynomial(p)
    assert re.is_real() and im.is_real()
