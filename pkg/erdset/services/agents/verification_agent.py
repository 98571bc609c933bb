"""Verification Agent - checks the assembled set with the detector."""

import logging
from typing import Any, Dict

from erdset.services.agents.base import BaseAgent
from erdset.services.detector import Found, detect_bb, timed, to_report

logger = logging.getLogger(__name__)


class VerificationAgent(BaseAgent):
    """Agent responsible for checking that no stage band admits a copy."""

    required_inputs = ("grid", "targets")

    def __init__(self):
        super().__init__(
            name="VerificationAgent",
            description="Runs detect_bb on the final grid for every stage point set and band",
        )

    def execute(self, input_data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Input:
            - grid: GridSet - assembled set
            - targets: list of (PointSet, alpha)
            - epsilon: float (optional)
            - budget: int (optional)

        Output:
            - reports: list of DetectionReport
            - found: int - number of Found verdicts
        """
        reports = []
        for points, alpha in input_data["targets"]:
            result, elapsed = timed(
                detect_bb, points, input_data["grid"], alpha,
                epsilon=input_data.get("epsilon"), budget=input_data.get("budget"),
            )
            if isinstance(result, Found):
                logger.warning(f"assembled set contains a copy for alpha={alpha}: {result.map}")
            reports.append(to_report(result, elapsed))
        found = sum(r.verdict == "Found" for r in reports)
        return {"reports": reports, "found": found}
