"""Agent Orchestrator - coordinates the finite-stage assembly."""

import logging
import math
from enum import Enum
from functools import reduce
from typing import Any, Dict, Iterable, Optional

from erdset.config import get_settings
from erdset.errors import DomainError, ResourceError
from erdset.models.schemas import AvoidingSetReport, StageRecord
from erdset.services.agents.cover_agent import CoverAgent
from erdset.services.agents.extraction_agent import ExtractionAgent
from erdset.services.agents.verification_agent import VerificationAgent
from erdset.services.grid import intersect
from erdset.services.sequences import SequenceFamily
from erdset.services.streams import derive_seed

logger = logging.getLogger(__name__)


class TaskType(str, Enum):
    """Types of tasks the orchestrator can handle."""
    EXTRACT = "extract"
    ASSEMBLE = "assemble"


def stage_alpha(k: int) -> float:
    """alpha_k = 4^-k."""
    return 4.0 ** -k


def common_resolution(resolutions: Iterable[int], dim: int, refine_max: int, max_cells: int) -> int:
    """lcm(L_k) * t for the largest t in [3, refine_max] that fits the cell cap."""
    base = reduce(math.lcm, resolutions, 1)
    for t in range(refine_max, 2, -1):
        if (base * t) ** dim <= max_cells:
            return base * t
    raise ResourceError(f"common resolution {base} x 3 exceeds the cap of {max_cells} cells")


class AgentOrchestrator:
    """
    Orchestrates the finite-stage assembly of an avoiding set.

    Workflow for ASSEMBLE (family -> avoiding grid):
        1. ExtractionAgent: accepted grid E_k for alpha_k = 4^-k, k = 1..K
        2. CoverAgent: refine E_k to the common resolution lcm(L_k) * t and
           remove the cover of V snapped at that resolution (one stage: no refinement)
        3. Intersect the E~_k
        4. VerificationAgent: detect_bb on the result for every (S_n, alpha_k)

    Workflow for EXTRACT:
        1. ExtractionAgent only
    """

    def __init__(self):
        """Initialize all agents."""
        self.extraction_agent = ExtractionAgent()
        self.cover_agent = CoverAgent()
        self.verification_agent = VerificationAgent()

    def run(self, task: TaskType, **input_data: Any) -> Dict[str, Any]:
        """Dispatch a task by type."""
        if task == TaskType.EXTRACT:
            return self.run_extraction(**input_data)
        if task == TaskType.ASSEMBLE:
            return self.run_assembly(**input_data)
        raise DomainError(f"unknown task {task!r}")

    def run_extraction(self, **input_data: Any) -> Dict[str, Any]:
        return self.extraction_agent.run(input_data)

    def run_assembly(
        self,
        family: SequenceFamily,
        alpha_stages: int,
        quality_k: int,
        n_search: Iterable[int],
        omega_trials: int,
        seed: int,
        pivot_index: int = 0,
        epsilon: Optional[float] = None,
        budget: Optional[int] = None,
        slack: Optional[float] = None,
    ) -> Dict[str, Any]:
        """
        Run the full assembly pipeline.

        Returns:
            Dict containing:
                - report: AvoidingSetReport (grid_file fields left empty)
                - stage_grids: list of GridSet - E~_k at the common resolution
                - final_grid: GridSet
        """
        if alpha_stages < 1:
            raise DomainError(f"alpha_stages must be >= 1, got {alpha_stages}")
        if family.dim != 1:
            raise DomainError("the assembly needs d = 1")
        settings = get_settings()
        n_search = list(n_search)

        # Step 1: extract a good stage for every band
        extracted = []
        for k in range(1, alpha_stages + 1):
            extracted.append(self.extraction_agent.run({
                "family": family,
                "alpha": stage_alpha(k),
                "quality_k": quality_k,
                "n_search": n_search,
                "omega_trials": omega_trials,
                "seed": derive_seed(seed, k),
                "pivot_index": pivot_index,
                "slack": slack,
            }))

        # Step 2: common resolution, then remove the cover of V at that resolution
        if alpha_stages == 1:
            resolution = extracted[0]["grid"].L
        else:
            resolution = common_resolution(
                (stage["grid"].L for stage in extracted), 1, settings.assembly_refine, settings.max_cells
            )
        covered = [
            self.cover_agent.run({
                "grid": stage["grid"],
                "copy_points": stage["copy_points"],
                "alpha": stage_alpha(k),
                "resolution": resolution,
            })
            for k, stage in enumerate(extracted, start=1)
        ]

        # Step 3: intersect
        grids = [c["grid"] for c in covered]
        final = reduce(intersect, grids)

        records = []
        for k, (stage, cover) in enumerate(zip(extracted, covered), start=1):
            loss = 1 - float(cover["grid"].measure)
            logger.info(f"stage alpha={stage_alpha(k)}: loss {loss:.4f} after cover and refinement")
            records.append(StageRecord(
                alpha_k=stage_alpha(k),
                pivot_index=pivot_index,
                stage_points=stage["stage_points"].coords.tolist(),
                report=stage["report"],
                cover_cells=cover["cover_cells"],
                mu_E_tilde=str(cover["grid"].measure),
                loss=loss,
            ))

        # Step 4: check the final set against every stage band
        verified = self.verification_agent.run({
            "grid": final,
            "targets": [(stage["stage_points"], stage_alpha(k)) for k, stage in enumerate(extracted, start=1)],
            "epsilon": epsilon,
            "budget": budget,
        })

        lower = 1 - sum(r.loss for r in records)
        if lower <= 0:
            logger.warning(f"stage losses sum to {1 - lower:.4f}; raise quality_k for a positive lower bound")
        logger.info(
            f"assembled set: measure {float(final.measure):.4f} (accounted lower bound {lower:.4f}), "
            f"{verified['found']} Found verdicts"
        )
        report = AvoidingSetReport(
            stages=records,
            resolution=resolution,
            final_measure=str(final.measure),
            final_measure_lower=lower,
            verification=verified["reports"],
        )
        return {"report": report, "stage_grids": grids, "final_grid": final}


# Singleton instance
_orchestrator: Optional[AgentOrchestrator] = None


def get_orchestrator() -> AgentOrchestrator:
    """Get singleton orchestrator instance."""
    global _orchestrator
    if _orchestrator is None:
        _orchestrator = AgentOrchestrator()
    return _orchestrator


def assemble_avoiding_set(
    family: SequenceFamily,
    alpha_stages: int,
    quality_k: int,
    budget: Optional[int],
    seed: int,
    n_search: Iterable[int] = range(2, 200),
    omega_trials: int = 16,
    **options: Any,
) -> Dict[str, Any]:
    """Finite-stage avoiding set; see AgentOrchestrator.run_assembly."""
    return get_orchestrator().run_assembly(
        family, alpha_stages, quality_k, n_search, omega_trials, seed, budget=budget, **options
    )
