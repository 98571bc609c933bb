"""`erdset seq` - condition table for a family."""

import logging
from typing import List

from erdset.models.run_config import SeqConfig
from erdset.services.experiment import analytic_bound
from erdset.services.formats import write_convergence_csv
from erdset.services.grid import stage_params
from erdset.services.sequences import condition_report

logger = logging.getLogger(__name__)


def run(config: SeqConfig) -> List[str]:
    family = config.build_family()
    rows = condition_report(family, config.n_max)

    extras = None
    if config.alpha is not None:
        extras = []
        for row in rows:
            params = stage_params(family.at(row.n), config.alpha, config.slack, n=row.n)
            extras.append({"L_n": params.L_n, "p_n": repr(params.p_n), "bound": repr(analytic_bound(params))})

    write_convergence_csv(config.output_dir / "conditions.csv", rows, extras)
    logger.info(f"{family.label}: {len(rows)} rows, last score {rows[-1].score:.6f}")
    return ["conditions.csv"]
