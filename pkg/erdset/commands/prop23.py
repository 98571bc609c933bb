"""`erdset prop23` - Markov extraction of one good stage."""

import logging
from typing import List

from erdset.errors import DomainError
from erdset.models.run_config import ExtractionConfig
from erdset.services.experiment import extract_good_omega
from erdset.services.formats import (
    format_grid,
    format_pointset,
    stage_columns,
    write_convergence_csv,
    write_model,
    write_text,
)
from erdset.services.sequences import condition_report

logger = logging.getLogger(__name__)


def run(config: ExtractionConfig) -> List[str]:
    family = config.build_family()
    if config.mode == "exact_1d" and family.dim != 1:
        raise DomainError(f"mode=exact_1d needs d = 1, family {family.label} has d = {family.dim}")

    report, E = extract_good_omega(
        family,
        config.alpha,
        config.quality_k,
        range(config.n_min, config.n_max + 1),
        config.omega_trials,
        config.master_seed,
        mode=config.mode,
        slack=config.slack,
        x_samples=config.x_samples,
        epsilon=config.epsilon,
        budget=config.budget,
    )

    out = config.output_dir
    n = report.params.n
    write_model(out / "stage.json", report)
    write_text(out / "grid.txt", format_grid(E))
    write_text(out / "points.txt", format_pointset(family.at(n)))

    rows = [row for row in condition_report(family, n) if row.n >= config.n_min]
    extras = [stage_columns(report) if row.n == n else None for row in rows]
    write_convergence_csv(out / "convergence.csv", rows, extras)
    return ["stage.json", "grid.txt", "points.txt", "convergence.csv"]
