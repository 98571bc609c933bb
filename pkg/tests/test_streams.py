import numpy as np
import pytest
from hypothesis import given, strategies as st

from erdset.services.streams import (
    GAMMA,
    TWO64,
    derive_seed,
    hash_counter,
    hash_range,
    mix,
    selection_threshold,
    uniform_from_hash,
)

u64 = st.integers(min_value=0, max_value=TWO64 - 1)


def test_mix_matches_splitmix64_first_output():
    """mix(GAMMA) is the first SplitMix64 output for state 0."""
    assert mix(GAMMA) == 0xE220A8397B1DCDAF


@given(u64, st.integers(min_value=0, max_value=10**6), st.integers(min_value=0, max_value=2000))
def test_hash_range_matches_scalar(seed, n, start):
    """The vectorised stream agrees with the scalar hash counter by counter."""
    values = hash_range(seed, n, start, start + 5)
    assert [int(v) for v in values] == [hash_counter(seed, n, i) for i in range(start, start + 5)]


def test_hash_depends_only_on_arguments():
    """Evaluation order does not change any counter."""
    forward = hash_range(7, 3, 0, 100)
    backward = [hash_counter(7, 3, i) for i in reversed(range(100))][::-1]
    assert [int(v) for v in forward] == backward


def test_derive_seed_separates_keys():
    """Distinct key paths give distinct seeds."""
    seeds = {derive_seed(0, n, t) for n in range(10) for t in range(10)}
    assert len(seeds) == 100
    assert derive_seed(0, 1, 2) != derive_seed(0, 2, 1)


@pytest.mark.parametrize(
    ("p", "expected"),
    (
        (0.0, 0),
        (-0.5, 0),
        (1.0, TWO64),
        (2.0, TWO64),
        (0.5, 1 << 63),
        (0.25, 1 << 62),
    ),
)
def test_selection_threshold(p, expected):
    """Thresholds for the boundary and dyadic probabilities."""
    assert selection_threshold(p) == expected


@given(u64)
def test_uniform_from_hash_in_unit_interval(h):
    """Top-53-bit uniforms lie in [0, 1)."""
    u = uniform_from_hash(h)
    assert 0.0 <= u < 1.0
    assert uniform_from_hash(np.array([h], dtype=np.uint64))[0] == u
