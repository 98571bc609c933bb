"""`erdset construct` - sample one stage grid."""

import logging
from typing import List

from erdset.models.run_config import ConstructConfig
from erdset.services.experiment import build_stage_report
from erdset.services.formats import format_grid, format_pbm, format_pointset, write_model, write_text
from erdset.services.grid import check_cells, sample_grid, stage_params

logger = logging.getLogger(__name__)


def run(config: ConstructConfig) -> List[str]:
    family = config.build_family()
    A = family.at(config.n)
    params = stage_params(A, config.alpha, config.slack, n=config.n)
    check_cells(params.dim, params.L_n, config.max_cells)
    E = sample_grid(params, config.master_seed, threads=config.threads, max_cells=config.max_cells)
    report = build_stage_report(params, E, config.master_seed)

    out = config.output_dir
    artefacts = ["points.txt", "grid.txt", "stage.json"]
    write_text(out / "points.txt", format_pointset(A))
    write_text(out / "grid.txt", format_grid(E))
    write_model(out / "stage.json", report)
    if E.dim == 2:
        write_text(out / "grid.pbm", format_pbm(E))
        artefacts.append("grid.pbm")

    logger.info(f"stage n={config.n}: L={params.L_n}, p={params.p_n:.6f}, mu(E)={float(E.measure):.6f}")
    return artefacts
