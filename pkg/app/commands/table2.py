import logging

import pandas as pd

from app.commands.formatting import best_estimate_text, significant, to_csv
from app.models.run_config import RunConfig
from app.services.gmmb_engine import best_estimate_with_error

logger = logging.getLogger(__name__)


def cmd_table2(config: RunConfig) -> str:
    """Best estimate across the correlation grid, one survival sample shared by every row."""
    rows = []
    for rho in config.rho_grid:
        params = config.model.model_copy(update={"rho": rho})
        estimate = best_estimate_with_error(params, config.mc)
        logger.info("rho=%g best estimate %.6f (se %.2g)", rho, estimate.estimate, estimate.standard_error)
        rows.append(
            {
                "rho": significant(rho),
                "best_estimate": best_estimate_text(estimate.estimate),
                "std_error": significant(estimate.standard_error),
            }
        )
    return to_csv(pd.DataFrame(rows, columns=["rho", "best_estimate", "std_error"]))
