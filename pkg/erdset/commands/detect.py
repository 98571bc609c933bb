"""`erdset detect` - search a grid file for copies of a point set."""

import logging
from typing import List

from erdset.models.run_config import DetectConfig
from erdset.services.arrangement import copy_regions_1d
from erdset.services.detector import detect_bb, timed, to_report
from erdset.services.formats import read_grid, read_pointset, write_model, write_polygons

logger = logging.getLogger(__name__)


def run(config: DetectConfig) -> List[str]:
    E = read_grid(config.grid)
    A = read_pointset(config.points)
    result, elapsed = timed(detect_bb, A, E, config.alpha, epsilon=config.epsilon, budget=config.budget)
    report = to_report(result, elapsed)
    write_model(config.output_dir / "detection.json", report)
    logger.info(f"verdict {report.verdict} after {report.boxes_explored} boxes ({elapsed:.1f} ms)")
    artefacts = ["detection.json"]

    if config.copy_regions and A.dim == 1:
        regions = copy_regions_1d(A, E, config.alpha)
        write_polygons(config.output_dir / "copy_regions.json", regions)
        logger.info(f"{len(regions)} copy regions, total area {float(sum(r.area for r in regions)):.4g}")
        artefacts.append("copy_regions.json")
    return artefacts
