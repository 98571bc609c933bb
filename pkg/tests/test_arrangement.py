import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from erdset.errors import DomainError
from erdset.services.arrangement import (
    Hyperplane,
    buck_bound,
    copy_regions_1d,
    enumerate_regions_1d,
    enumerate_regions_2d,
    lambda_windows,
    representative_bound,
    representative_scalars_1d,
    window_budget,
)
from erdset.services.detector import verify_witness
from erdset.services.geometry import AffineMap, PointSet
from erdset.services.grid import GridSet, stage_params

BIG_BOX = (-100, -100, 100, 100)


@pytest.mark.parametrize(("n", "dim", "expected"), ((2, 2, 4), (3, 2, 7), (0, 2, 1), (0, 5, 1), (4, 1, 5)))
def test_buck_bound(n, dim, expected):
    """Sum of binomials C(n, k) for k <= dim."""
    assert buck_bound(n, dim) == expected


# --- line -------------------------------------------------------------------------


def test_regions_1d_two_breakpoints():
    """{0, 1} cuts the line into three regions."""
    reps = [r.representative[0] for r in enumerate_regions_1d([0, 1])]
    assert reps == [-1, Fraction(1, 2), 2]


def test_regions_1d_empty():
    """No breakpoints leave the whole line with representative 0."""
    regions = enumerate_regions_1d([])
    assert len(regions) == 1
    assert regions[0].representative == (0,)


def test_regions_1d_duplicates():
    """Repeated breakpoints are counted once."""
    assert len(enumerate_regions_1d([1, 1])) == 2


# --- plane ------------------------------------------------------------------------


def line(a: float, b: float, c: float) -> Hyperplane:
    return Hyperplane.from_coefficients((a, b), c)


def test_regions_2d_generic_lines():
    """Three lines in general position make seven regions."""
    count, regions = enumerate_regions_2d([line(1, 0, 0), line(0, 1, 0), line(1, 1, -1)], BIG_BOX)
    assert count == 7 == buck_bound(3, 2)
    assert len({r.sign_vector for r in regions}) == 7


def test_regions_2d_concurrent_lines():
    """Three lines through one point make six regions."""
    count, _ = enumerate_regions_2d([line(1, 0, 0), line(0, 1, 0), line(1, -1, 0)], BIG_BOX)
    assert count == 6


def test_regions_2d_no_lines():
    """The empty arrangement is a single region."""
    count, regions = enumerate_regions_2d([], BIG_BOX)
    assert count == 1
    assert regions[0].sign_vector == ()


def test_regions_2d_degenerate_box():
    """A flat bounding box is rejected."""
    with pytest.raises(DomainError):
        enumerate_regions_2d([], (0, 0, 0, 1))


def test_regions_2d_representatives_are_interior():
    """Every representative lies strictly off every line, on its recorded side."""
    lines = [line(1, 2, -1), line(-1, 1, 0.5), line(3, -1, 2), line(0, 1, 4)]
    _, regions = enumerate_regions_2d(lines, BIG_BOX)
    for region in regions:
        for h, sign in zip(lines, region.sign_vector):
            value = h.evaluate(region.representative)
            assert value != 0
            assert (value > 0) == (sign == "+")


def test_regions_2d_random_lines_meet_buck_bound():
    """Random lines reach Buck's bound in a box holding every crossing, and never exceed it."""
    rng = random.Random(2024)
    equal = 0
    for _ in range(100):
        n = rng.randint(1, 6)
        lines = [line(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(n)]
        count, _ = enumerate_regions_2d(lines, (-10**9, -10**9, 10**9, 10**9))
        assert count <= buck_bound(n, 2)
        equal += count == buck_bound(n, 2)
    assert equal >= 95


def test_hyperplane_requires_unit_normal():
    """Normals must have unit length."""
    with pytest.raises(DomainError):
        Hyperplane((1.0, 1.0), 0.0)


# --- windows and representatives --------------------------------------------------


def test_lambda_window_example():
    """x = 0.5, |a| = 0.1, alpha = 0.5, L = 10 gives j in {3, ..., 7}."""
    windows = lambda_windows([0.5], PointSet([0.1]), 10, 0.5)
    assert len(windows) == 1
    assert windows[0].js == (3, 4, 5, 6, 7)
    assert (windows[0].ell, windows[0].i) == (1, 1)


def test_lambda_window_full_range():
    """A reach beyond the unit interval covers every grid line."""
    windows = lambda_windows([0.5], PointSet([5.0]), 8, 0.1)
    assert windows[0].js == tuple(range(9))


def test_lambda_windows_per_axis_and_point():
    """One window per (axis, point) pair, indexed from 1."""
    windows = lambda_windows([0.2, 0.8], PointSet([[0.1, 0.0], [0.0, 0.2], [0.1, 0.1]]), 6, 0.5)
    assert [(w.ell, w.i) for w in windows] == [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)]


def test_representatives_unit_point():
    """A = {1}, x = 0, L = 1, alpha = 1/2 gives three candidates in the band."""
    reps = representative_scalars_1d(0.0, PointSet([1.0]), 1, 0.5)
    assert sorted(reps) == [Fraction(-5, 4), Fraction(3, 4), Fraction(3, 2)]


def test_representatives_without_breakpoints_in_band():
    """With every grid breakpoint outside the band only band midpoints remain."""
    reps = representative_scalars_1d(0.5, PointSet([100.0]), 1, 0.5)
    assert sorted(reps) == [Fraction(-5, 4), Fraction(5, 4)]


def test_representatives_need_nonzero_points():
    """The origin has no breakpoints."""
    with pytest.raises(DomainError):
        representative_scalars_1d(0.5, PointSet([0.0, 1.0]), 4, 0.5)


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.integers(min_value=-20, max_value=20).filter(bool), min_size=2, max_size=5, unique=True),
    st.floats(min_value=0.3, max_value=0.9),
    st.floats(min_value=0.0, max_value=1.0),
)
def test_representative_count_within_bound(numerators, alpha, x):
    """Candidate counts and window totals respect their bounds at the stage resolution."""
    A = PointSet([v / 20 for v in numerators])
    L = stage_params(A, alpha).L_n
    reps = representative_scalars_1d(x, A, L, alpha)
    windows = lambda_windows([x], A, L, alpha)
    assert len(reps) <= representative_bound(1, alpha, L, A.max_norm, A.size)
    assert sum(len(w.js) for w in windows) <= window_budget(1, A.max_norm, L, A.size, alpha)


# --- copy regions -----------------------------------------------------------------


def test_copy_regions_empty_grid():
    """No selected cells means no copies."""
    assert copy_regions_1d(PointSet([0.5, 1.0]), GridSet.empty(1, 4), 0.4) == []


def test_copy_regions_two_cell_instance(two_points, two_cell_grid):
    """(lambda, x) = (0.45, 0.29) maps {1/2, 1} into (1/2, 3/4)."""
    regions = copy_regions_1d(two_points, two_cell_grid, 0.4)
    assert regions
    assert any(region.contains(0.45, 0.29) for region in regions)
    assert all(region.area > 0 for region in regions)


def test_copy_regions_cover_every_translation(full_line_grid):
    """A short point in a full grid admits a copy at every x."""
    regions = copy_regions_1d(PointSet([0.1]), full_line_grid, 0.5)
    starts = min(r.x_range[0] for r in regions)
    ends = max(r.x_range[1] for r in regions)
    assert (starts, ends) == (0, 1)


def test_copy_region_points_are_copies(two_points, two_cell_grid):
    """Vertex centroids of every region give images inside selected cells."""
    for region in copy_regions_1d(two_points, two_cell_grid, 0.4):
        n = len(region.vertices)
        lam = sum(v[0] for v in region.vertices) / n
        x = sum(v[1] for v in region.vertices) / n
        assert Fraction(2, 5) < abs(lam) < Fraction(5, 2)
        for a in (Fraction(1, 2), Fraction(1)):
            y = lam * a + x
            j = math.floor(y * 4)
            assert y * 4 != j and 0 <= j < 4 and two_cell_grid.bits[j]


def test_copy_regions_need_line():
    """Copy regions are defined for d = 1 only."""
    with pytest.raises(DomainError):
        copy_regions_1d(PointSet([[0.1, 0.2]]), GridSet.full(2, 2), 0.5)


def test_copy_regions_agree_with_witness_check():
    """Region membership and verify_witness give the same answer on random (A, E, alpha, lambda, x)."""
    rng = np.random.default_rng(2024)
    for _ in range(200):
        k = int(rng.integers(1, 5))
        A = PointSet(rng.uniform(0.05, 1.0, size=k) * rng.choice([-1.0, 1.0], size=k))
        alpha = float(rng.uniform(0.2, 0.8))
        L = int(rng.integers(2, 13))
        E = GridSet(1, L, rng.random(L) < 0.6)
        regions = copy_regions_1d(A, E, alpha)

        for lam, x in zip(rng.uniform(-1 / alpha - 0.5, 1 / alpha + 0.5, size=50), rng.random(50)):
            inside = any(region.contains(lam, x) for region in regions)
            assert inside == verify_witness(AffineMap([[lam]], [x]), A, E, alpha)

        for region in regions:
            n = len(region.vertices)
            lam = sum(v[0] for v in region.vertices) / n
            x = sum(v[1] for v in region.vertices) / n
            assert verify_witness(AffineMap([[float(lam)]], [float(x)]), A, E, alpha)
