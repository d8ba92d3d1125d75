import logging

import pandas as pd

from app.commands.formatting import best_estimate_text, significant, to_csv
from app.models.gmmb import ValuationReport
from app.models.run_config import RunConfig
from app.services.gmmb_engine import coc_value

logger = logging.getLogger(__name__)


def coc_reports(config: RunConfig) -> list[ValuationReport]:
    act = config.scr_principle.to_principle()
    return [
        coc_value(config.model.model_copy(update={"rho": rho}), config.mc, act, config.coc_rate)
        for rho in config.rho_grid
    ]


def cmd_coc(config: RunConfig) -> str:
    """Cost-of-capital value against the Brennan-Schwartz benchmark across the grid."""
    rows = []
    for report in coc_reports(config):
        if report.clamped_paths:
            logger.warning("rho=%g: %d survival draws clamped", report.rho, report.clamped_paths)
        rows.append(
            {
                "rho": significant(report.rho),
                "best_estimate": best_estimate_text(report.best_estimate),
                "scr": significant(report.scr),
                "coc_value": significant(report.coc_value),
                "bs_benchmark": significant(report.bs_benchmark),
            }
        )
    columns = ["rho", "best_estimate", "scr", "coc_value", "bs_benchmark"]
    return to_csv(pd.DataFrame(rows, columns=columns))
