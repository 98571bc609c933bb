"""Cover Agent - removes an open cover of V from a stage grid."""

import logging
import math
from fractions import Fraction
from typing import Any, Dict, List, Tuple

import numpy as np

from erdset.errors import DomainError
from erdset.services.agents.base import BaseAgent
from erdset.services.detector import exact_V_1d
from erdset.services.grid import GridSet, refine, subtract

logger = logging.getLogger(__name__)


def cover_grid(intervals: List[Tuple[Fraction, Fraction]], L: int) -> GridSet:
    """Cells meeting any interval inflated by one cell width on each side."""
    bits = np.zeros(L, dtype=bool)
    for start, end in intervals:
        j_lo = max(0, math.floor(start * L) - 1)
        j_hi = min(L - 1, math.ceil(end * L))
        bits[j_lo:j_hi + 1] = True
    return GridSet(1, L, bits)


class CoverAgent(BaseAgent):
    """
    Agent responsible for the E minus cover(V) step.

    V is computed exactly on the stage grid. With a finer target resolution the
    grid is refined first and the cover is snapped at the fine resolution, so
    only one fine cell of slack is lost on each side of every V interval.
    """

    required_inputs = ("grid", "copy_points", "alpha")

    def __init__(self):
        super().__init__(
            name="CoverAgent",
            description="Subtracts an outward-snapped cover of the copy set V from E",
        )

    def execute(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Input:
            - grid: GridSet - accepted stage grid (d = 1)
            - copy_points: PointSet - S_n without the origin
            - alpha: float
            - resolution: int - multiple of grid.L to work at (optional, default grid.L)

        Output:
            - grid: GridSet - E minus the cover, at the requested resolution
            - cover_cells: int
            - intervals: list of (Fraction, Fraction) - exact V
        """
        grid = input_data["grid"]
        if grid.dim != 1:
            raise DomainError("the cover step needs d = 1")
        resolution = input_data.get("resolution") or grid.L
        if resolution % grid.L:
            raise DomainError(f"resolution {resolution} is not a multiple of L = {grid.L}")

        intervals, measure = exact_V_1d(input_data["copy_points"], grid, input_data["alpha"])
        fine = grid if resolution == grid.L else refine(grid, resolution // grid.L)
        cover = cover_grid(intervals, resolution)
        reduced = subtract(fine, cover)
        logger.info(
            f"cover of V (measure {float(measure):.4g}) at L={resolution} leaves "
            f"{float(reduced.measure):.4f} of {float(grid.measure):.4f}"
        )
        return {"grid": reduced, "cover_cells": cover.count, "intervals": intervals}
