"""`erdset theorem21` - finite-stage assembly of an avoiding set."""

import logging
from typing import List

from erdset.models.run_config import AssemblyConfig
from erdset.services.agents import TaskType, get_orchestrator
from erdset.services.formats import format_grid, write_model, write_text

logger = logging.getLogger(__name__)


def run(config: AssemblyConfig) -> List[str]:
    result = get_orchestrator().run(
        TaskType.ASSEMBLE,
        family=config.build_family(),
        alpha_stages=config.stages,
        quality_k=config.quality_k,
        n_search=range(config.n_min, config.n_max + 1),
        omega_trials=config.omega_trials,
        seed=config.master_seed,
        pivot_index=config.pivot_index,
        epsilon=config.epsilon,
        budget=config.budget,
        slack=config.slack,
    )
    out = config.output_dir
    report = result["report"]
    artefacts = []
    for k, (record, grid) in enumerate(zip(report.stages, result["stage_grids"]), start=1):
        name = f"stage_{k}.txt"
        write_text(out / name, format_grid(grid))
        record.grid_file = name
        artefacts.append(name)

    write_text(out / "final.txt", format_grid(result["final_grid"]))
    report.final_grid_file = "final.txt"
    write_model(out / "avoiding_set.json", report)
    return artefacts + ["final.txt", "avoiding_set.json"]
