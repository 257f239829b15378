import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import RING2, polymaps, polynomials
from oracles import charpoly_nilpotent
from nilmap.errors import PreconditionError
from nilmap.fuzz import generate_nilpotent
from nilmap.nilpotency import (SignClass, closed_form_eigenvalue, euler_identity_check,
                               is_nilpotent, is_nilpotent_matrix, jacobian_rank,
                               lemma1_bridge, sign_classify, two_form_identity_check)
from nilmap.pmap import parse_pmap
from nilmap.polymap import PolyMap, PolyMatrix, determinant, jacobian
from nilmap.polynomial import Polynomial
from nilmap.scalars import ExtensionScalar


def M(text):
    return parse_pmap(text).to_polymap()


def test_nilpotent_example():
    r = is_nilpotent(M("vars x y\neq y^2\neq 0"))
    assert r and r.trace is None


def test_identity_not_nilpotent():
    r = is_nilpotent(PolyMap.identity(("x", "y", "z")))
    assert not r and r.power == 1 and r.witness == 3


def test_squares_trace_witness():
    r = is_nilpotent(M("vars x y\neq x^2\neq y^2"))
    assert not r and r.witness == parse_pmap("vars x y\neq 2*x + 2*y\neq 0").equations[0]


def test_bridge_det():
    B = lemma1_bridge(M("vars x y\neq x\neq 0"))
    t = Polynomial.var(B.ring, 2)
    assert determinant(jacobian(B)) == 1 - t


def test_bridge_nilpotent_det_one():
    assert determinant(jacobian(lemma1_bridge(M("vars x y\neq y^2\neq 0")))) == 1


def test_euler_rejects_wrong_degree():
    with pytest.raises(PreconditionError):
        euler_identity_check(M("vars x y\neq x^3\neq 0"), 2)


def test_euler_passes():
    assert euler_identity_check(M("vars x y\neq x*y\neq y^2 - 3*x^2"), 2)


def test_eigenvalues():
    assert closed_form_eigenvalue(2, 3) ** 1 == ExtensionScalar.embed(Fraction(4, 3), 1, Fraction(2, 3))
    assert closed_form_eigenvalue(1, 3) ** 2 == ExtensionScalar.embed(1, 2, Fraction(1, 3))


def test_two_form_example():
    N1 = M("vars x y z\neq y\neq z\neq 0")
    N2 = M("vars x y z\neq z^2\neq 0\neq 0")
    assert two_form_identity_check(N1, N2, 1, 2)


@pytest.mark.parametrize("text,rank", [
    ("vars x y\neq y^2\neq 0", 1),
    ("vars x y\neq 0\neq 0", 0),
    ("vars x y z\neq x\neq y\neq z", 3),
])
def test_rank(text, rank):
    assert jacobian_rank(M(text)) == rank


@pytest.mark.parametrize("text,cls", [
    ("vars x y\neq x + x^2 + y^2\neq y + x*y", SignClass.POSITIVE),
    ("vars x y\neq x - x^3\neq y", SignClass.NEGATIVE),
    ("vars x y\neq x + x^2 - y^2\neq y", SignClass.NEITHER),
])
def test_sign_classes(text, cls):
    assert sign_classify(M(text)).classification == cls


def test_sign_requires_real():
    with pytest.raises(PreconditionError):
        sign_classify(M("vars x\neq x + i*x^2"))


# --- properties ---

@given(polymaps(max_deg=3))
def test_trace_verdict_matches_charpoly(F):
    J = jacobian(F)
    assert bool(is_nilpotent_matrix(J)) == charpoly_nilpotent(J.entries)


@given(st.integers(0, 10**6), st.sampled_from(["strict-triangular", "homogeneous", "two-form"]),
       st.integers(2, 4))
def test_generated_nilpotent_charpoly(seed, family, n):
    N, _ = generate_nilpotent(family, n, 3, random.Random(seed))
    assert charpoly_nilpotent(jacobian(N).entries)
    assert jacobian_rank(N) <= n - 1


@given(st.integers(0, 10**6), st.integers(2, 4))
def test_bridge_biconditional_on_nilpotent(seed, n):
    N, _ = generate_nilpotent("conjugated-triangular", n, 2, random.Random(seed))
    assert determinant(jacobian(lemma1_bridge(N))) == 1


@given(polymaps(max_deg=2))
def test_bridge_biconditional_generic(F):
    assert bool(is_nilpotent(F)) == (determinant(jacobian(lemma1_bridge(F))) == 1)


@given(st.lists(polynomials(RING2, max_deg=2, max_terms=2), min_size=4, max_size=4))
def test_strictly_upper_matrices_nilpotent(e):
    zero = Polynomial.zero(RING2)
    A = PolyMatrix([[zero, e[0], e[1]], [zero, zero, e[2]], [zero, zero, zero]], RING2)
    assert is_nilpotent_matrix(A)
    assert is_nilpotent_matrix(A.transpose())
