"""Shared fixtures: small point sets and grids, isolated settings."""

import math
import os

import pytest

from erdset.config import get_settings
from erdset.models.schemas import StageParams
from erdset.services.geometry import PointSet
from erdset.services.grid import GridSet


@pytest.fixture(autouse=True)
def isolated_settings():
    """Each test sees default settings and leaves the environment as it found it."""
    saved = dict(os.environ)
    for name in list(os.environ):
        if name.startswith("ERDSET_"):
            del os.environ[name]
    get_settings.cache_clear()
    yield
    os.environ.clear()
    os.environ.update(saved)
    get_settings.cache_clear()


@pytest.fixture
def two_cell_grid() -> GridSet:
    """Cells (0, 1/4) and (1/2, 3/4) of the L = 4 line grid."""
    return GridSet.from_cells(1, 4, [0, 2])


@pytest.fixture
def two_points() -> PointSet:
    return PointSet([0.5, 1.0])


@pytest.fixture
def full_line_grid() -> GridSet:
    return GridSet.full(1, 2)


def make_params(L: int, p: float, dim: int = 1, n: int = 1) -> StageParams:
    """Hand-built stage parameters for grid tests."""
    return StageParams(
        n=n, dim=dim, alpha=0.5, k_n=2, delta_n=0.5, M_n=1.0,
        L_n=L, p_n=p, log_p=math.log(p) if p > 0 else -math.inf, slack=1.0,
    )
