import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nilmap.errors import PreconditionError
from nilmap.fuzz import FAMILIES, fuzz_jn, generate_nilpotent
from nilmap.nilpotency import is_nilpotent

families = st.sampled_from(FAMILIES)


@given(families, st.integers(1, 4), st.integers(2, 3), st.integers(0, 10**6))
def test_generated_maps_are_nilpotent(family, n, deg, seed):
    N, tag = generate_nilpotent(family, n, deg, random.Random(seed))
    assert N.dim == n and tag
    assert is_nilpotent(N)


@settings(max_examples=10)
@given(families, st.integers(2, 3), st.integers(0, 1000))
def test_fuzz_digest_is_a_function_of_the_seed(family, n, seed):
    a = fuzz_jn(family, n, 2, 2, seed=seed, seeds=8)
    b = fuzz_jn(family, n, 2, 2, seed=seed, seeds=8)
    assert a.determinism_digest() == b.determinism_digest()
    assert a.verdicts["violations"] == 0


def test_timings_do_not_enter_digest():
    rep = fuzz_jn("homogeneous", 2, 2, 1, seed=0, seeds=4)
    d = rep.determinism_digest()
    rep.timings["total"] = 123.0
    assert rep.determinism_digest() == d


def test_bad_family_and_degree():
    with pytest.raises(PreconditionError):
        generate_nilpotent("nope", 2, 2, random.Random(0))
    with pytest.raises(PreconditionError):
        generate_nilpotent("two-form", 2, 1, random.Random(0))
