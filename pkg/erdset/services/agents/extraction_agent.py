"""Extraction Agent - finds a good stage grid for one band."""

import logging
from typing import Any, Dict

from erdset.errors import DomainError
from erdset.services.agents.base import BaseAgent
from erdset.services.experiment import extract_good_omega
from erdset.services.geometry import PointSet, normalize_origin, strip_origin

logger = logging.getLogger(__name__)


def stage_point_set(A: PointSet, pivot_index: int) -> PointSet:
    """S_n = (A_n - a0) u {0}."""
    shifted, c_tilde = normalize_origin(A, pivot_index)
    logger.debug(f"pivot {pivot_index}: C~ = {c_tilde:.6g}")
    return shifted


class ExtractionAgent(BaseAgent):
    """
    Agent responsible for the Markov extraction of one stage.

    Normalises each A_n about its pivot, strips the origin and searches for a
    grid whose measure is large and whose copy set V is small.
    """

    required_inputs = ("family", "alpha", "quality_k", "n_search", "omega_trials", "seed")

    def __init__(self):
        super().__init__(
            name="ExtractionAgent",
            description="Searches stages n and grids omega meeting both Markov thresholds",
        )

    def execute(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Extract an accepted stage.

        Input:
            - family: SequenceFamily
            - alpha: float - band parameter of this stage
            - quality_k: int - acceptance quality
            - n_search: iterable of int - stages to scan
            - omega_trials: int - grids drawn per stage
            - seed: int - stage seed
            - pivot_index: int - pivot used for normalisation (optional, default 0)
            - slack: float (optional)

        Output:
            - report: StageReport
            - grid: GridSet - accepted grid E
            - stage_points: PointSet - S_n, contains the origin
            - copy_points: PointSet - S_n without the origin
        """
        family = input_data["family"]
        if family.dim != 1:
            raise DomainError("stage extraction for the assembly needs d = 1")
        pivot_index = input_data.get("pivot_index", 0)

        def copy_points(n: int) -> PointSet:
            return strip_origin(stage_point_set(family.at(n), pivot_index))

        report, grid = extract_good_omega(
            family,
            input_data["alpha"],
            input_data["quality_k"],
            input_data["n_search"],
            input_data["omega_trials"],
            input_data["seed"],
            mode="exact_1d",
            slack=input_data.get("slack"),
            point_set=copy_points,
        )
        n = report.params.n
        stage_points = stage_point_set(family.at(n), pivot_index)
        return {
            "report": report,
            "grid": grid,
            "stage_points": stage_points,
            "copy_points": strip_origin(stage_points),
        }
