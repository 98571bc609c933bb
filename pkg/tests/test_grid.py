import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from erdset.errors import DomainError, ResourceError
from erdset.services import grid as grid_module
from erdset.services.geometry import PointSet
from erdset.services.grid import (
    CellIndex,
    GridSet,
    Placement,
    contains_open,
    intersect,
    locate,
    log_selection_probability,
    measure,
    refine,
    sample_grid,
    stage_params,
    stage_resolution,
    subtract,
)
from erdset.services.sequences import gen_progression_family
from tests.conftest import make_params


# --- stage parameters -------------------------------------------------------------


def test_stage_resolution_planar_example():
    """d = 2, alpha = 1/2, M = 1, delta = 0.1 gives L = 40."""
    assert stage_resolution(2, 0.5, 1.0, 0.1) == 40


def test_stage_resolution_from_exact_gap():
    """An exact gap of 1/10 at alpha = 1/4 gives L = 40 in d = 1."""
    assert stage_resolution(1, 0.25, gap=Fraction(1, 10)) == 40
    with pytest.raises(DomainError):
        stage_resolution(1, 0.5, gap=Fraction(0))


@pytest.mark.parametrize("n", [1, 3, 7, 20])
def test_stage_params_resolution_matches_gap(n):
    """stage_params takes L_n from the exact minimum gap of A_n."""
    A = gen_progression_family().at(n)
    params = stage_params(A, 0.5, n=n)
    gap = Fraction(1, 1 << n.bit_length())
    assert params.L_n == stage_resolution(1, 0.5, gap=gap)
    assert params.L_n == 2 << n.bit_length()


def test_log_selection_probability_example():
    """d = 1, delta = 0.1, k = 10, slack = 1 gives log p ~ -0.9210."""
    log_p = log_selection_probability(1, 10, 0.1, 1.0)
    assert log_p == pytest.approx(-0.921034, abs=1e-6)
    assert math.exp(log_p) == pytest.approx(0.398107, abs=1e-6)


def test_stage_params_antipodal_pair():
    """Two antipodal unit points have delta = 2 and a single cell."""
    params = stage_params(PointSet([1.0, -1.0]), 0.5)
    assert params.delta_n == 2.0
    assert params.L_n == 1
    assert params.p_n == pytest.approx(0.5)


def test_stage_params_progression_is_dyadic():
    """Binary-fraction points give a power-of-two resolution."""
    for n in (3, 7, 20, 63):
        params = stage_params(gen_progression_family().at(n), 0.5, n=n)
        assert params.L_n & (params.L_n - 1) == 0
        assert params.delta_n == pytest.approx(1 / (n + 1))


def test_stage_params_rejects_origin():
    """A_n must not contain the origin."""
    with pytest.raises(DomainError):
        stage_params(PointSet([0.0, 1.0]), 0.5)


@given(st.integers(min_value=2, max_value=10**6), st.floats(min_value=1e-6, max_value=2.0))
def test_log_selection_probability_negative(k, delta_n):
    """log p_n is negative for every admissible stage."""
    log_p = log_selection_probability(1, k, delta_n, 1.0)
    assert log_p < 0


# --- sampling ---------------------------------------------------------------------


def test_sample_grid_forced_probabilities():
    """p = 1 selects everything and p = 0 nothing."""
    assert measure(sample_grid(make_params(16, 1.0), seed=3)) == 1
    assert measure(sample_grid(make_params(16, 0.0), seed=3)) == 0


def test_sample_grid_deterministic():
    """The same parameters and seed give bit-identical grids."""
    params = make_params(64, 0.4, dim=2)
    assert sample_grid(params, seed=11) == sample_grid(params, seed=11)
    assert sample_grid(params, seed=11) != sample_grid(params, seed=12)


def test_sample_grid_independent_of_threads(monkeypatch):
    """Chunked multi-threaded sampling matches the sequential result."""
    monkeypatch.setattr(grid_module, "SAMPLE_CHUNK", 1000)
    params = make_params(10_007, 0.3)
    assert sample_grid(params, seed=5, threads=1) == sample_grid(params, seed=5, threads=4)


def test_sample_grid_cell_cap():
    """Grids above the cap raise ResourceError."""
    with pytest.raises(ResourceError):
        sample_grid(make_params(1024, 0.5, dim=2), seed=0, max_cells=1000)


def test_sample_mean_matches_p():
    """The mean measure over 1000 seeds is within the central-limit band of p_n."""
    params = make_params(16, 0.37, dim=2)
    cells = params.total_cells
    values = [float(sample_grid(params, seed=s).measure) for s in range(1000)]
    tolerance = 4 * math.sqrt(params.p_n * (1 - params.p_n) / (1000 * cells))
    assert abs(np.mean(values) - params.p_n) <= tolerance


def test_sample_mean_line_grid():
    """d = 1, L = 64, p = 0.9: the mean over 1000 seeds is within 0.0036 of p."""
    params = make_params(64, 0.9)
    values = [float(sample_grid(params, seed=s).measure) for s in range(1000)]
    assert abs(np.mean(values) - 0.9) <= 0.0036


# --- measure, locate, membership --------------------------------------------------


def test_measure_examples():
    """Exact measures of empty, full and partial grids."""
    assert measure(GridSet.empty(2, 4)) == 0
    assert measure(GridSet.full(2, 4)) == 1
    assert measure(GridSet.from_cells(1, 16, [0, 5, 9])) == Fraction(3, 16)


@pytest.mark.parametrize(
    ("point", "expected"),
    (
        ((0.3, 0.7), CellIndex((0, 1))),
        ((0.5, 0.1), Placement.ON_BOUNDARY),
        ((1.2, 0.0), Placement.OUTSIDE),
        ((0.0, 0.25), Placement.ON_BOUNDARY),
        ((1.0, 1.0), Placement.ON_BOUNDARY),
    ),
)
def test_locate(point, expected):
    """Cells, grid lines and points outside the unit cube at L = 2."""
    assert locate(point, 2) == expected


def test_locate_exact_fractions():
    """Fraction coordinates are located exactly."""
    assert locate((Fraction(1, 3),), 3) == Placement.ON_BOUNDARY
    assert locate((Fraction(1, 3) + Fraction(1, 10**30),), 3) == CellIndex((1,))


def test_contains_open():
    """Open cells contain interior points and never their boundary."""
    full = GridSet.full(2, 4)
    assert contains_open(full, (0.3, 0.6))
    assert not contains_open(full, (0.25, 0.6))
    assert not contains_open(GridSet.empty(2, 4), (0.3, 0.6))


def test_contains_open_dimension_mismatch():
    """A point of the wrong dimension is an error."""
    with pytest.raises(DomainError):
        contains_open(GridSet.full(2, 4), (0.3,))


# --- refine and set algebra -------------------------------------------------------


def test_refine_identity():
    """factor 1 leaves the grid unchanged."""
    E = GridSet.from_cells(2, 3, [(0, 1), (2, 2)])
    assert refine(E, 1) == E


def test_refine_single_cell():
    """The unit cell refined by 4 keeps its two interior subcells."""
    refined = refine(GridSet.full(1, 1), 4)
    assert refined.bits.tolist() == [False, True, True, False]
    assert refined.measure == Fraction(1, 2)


def test_refine_empty():
    """Refining nothing gives nothing."""
    assert refine(GridSet.empty(2, 3), 5).count == 0


@settings(max_examples=30, deadline=None)
@given(
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=1, max_value=5),
    st.integers(min_value=2, max_value=6),
    st.integers(min_value=0, max_value=2**32),
)
def test_refine_measure_ratio(dim, L, factor, seed):
    """Each selected parent keeps ((factor - 2)/factor)^d of its measure."""
    E = sample_grid(make_params(L, 0.5, dim=dim), seed=seed)
    refined = refine(E, factor)
    assert refined.L == L * factor
    assert refined.measure == E.measure * Fraction(factor - 2, factor) ** dim


def test_refined_cells_lie_inside_parents():
    """Every refined cell sits strictly inside a selected parent cell."""
    E = GridSet.from_cells(2, 3, [(0, 0), (1, 2)])
    refined = refine(E, 5)
    for index in np.flatnonzero(refined.bits):
        j = np.unravel_index(index, (15, 15))
        assert E.cell_bit(tuple(int(v) // 5 for v in j))
        assert all(int(v) % 5 not in (0, 4) for v in j)


def test_intersect_and_subtract():
    """E and full is E, E minus E is empty, disjoint halves do not meet."""
    E = sample_grid(make_params(8, 0.5, dim=2), seed=9)
    assert intersect(E, GridSet.full(2, 8)) == E
    assert subtract(E, E).count == 0
    assert intersect(GridSet.from_cells(1, 2, [0]), GridSet.from_cells(1, 2, [1])).count == 0


@settings(max_examples=30)
@given(st.integers(min_value=0, max_value=2**32), st.integers(min_value=0, max_value=2**32))
def test_intersection_measure_bound(seed1, seed2):
    """mu(E1 and E2) >= mu(E1) + mu(E2) - 1."""
    E1 = sample_grid(make_params(8, 0.6), seed=seed1)
    E2 = sample_grid(make_params(8, 0.7), seed=seed2)
    assert intersect(E1, E2).measure >= E1.measure + E2.measure - 1


def test_mismatched_resolution():
    """Grids at different resolutions cannot be combined directly."""
    with pytest.raises(DomainError):
        intersect(GridSet.full(1, 2), GridSet.full(1, 4))
    with pytest.raises(DomainError):
        subtract(GridSet.full(1, 2), GridSet.full(2, 2))


def test_summed_area_counts():
    """Box counts from the summed-area table match direct counting."""
    E = sample_grid(make_params(6, 0.5, dim=2), seed=4)
    lo = np.array([[0, 0], [1, 2], [3, 3], [5, 0]])
    hi = np.array([[5, 5], [4, 2], [3, 3], [5, 5]])
    expected = [int(E.cube()[a:c + 1, b:d + 1].sum()) for (a, b), (c, d) in zip(lo, hi)]
    assert E.count_in_boxes(lo, hi).tolist() == expected
