import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from nilmap.polymap import PolyMap  # noqa: E402
from nilmap.polynomial import Polynomial  # noqa: E402
from nilmap.scalars import GaussianRational  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

RING2 = ("x", "y")
RING3 = ("x", "y", "z")

small_int = st.integers(-4, 4)
rationals = st.builds(lambda a, b: GaussianRational(a) / b, small_int, st.integers(1, 3))
gaussians = st.builds(lambda a, b, c: GaussianRational(a, b) / c, small_int, small_int,
                      st.integers(1, 3))


@st.composite
def polynomials(draw, ring=RING3, max_deg=3, max_terms=4, coeffs=gaussians, min_deg=0):
    n = len(ring)
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        deg = draw(st.integers(min_deg, max_deg))
        mono = [0] * n
        for _ in range(deg):
            mono[draw(st.integers(0, n - 1))] += 1
        terms[tuple(mono)] = draw(coeffs)
    return Polynomial(ring, terms)


@st.composite
def homogeneous_polys(draw, ring=RING3, k=2, max_terms=3):
    return draw(polynomials(ring, max_deg=k, min_deg=k, max_terms=max_terms))


@st.composite
def polymaps(draw, ring=RING2, max_deg=3, max_terms=3, coeffs=gaussians):
    return PolyMap([draw(polynomials(ring, max_deg, max_terms, coeffs)) for _ in ring], ring)
