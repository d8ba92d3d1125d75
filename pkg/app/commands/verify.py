import logging

from app.core.config import settings
from app.models.run_config import RunConfig
from app.models.verification import VerifyReport
from app.services.verification import run_suites

logger = logging.getLogger(__name__)


def cmd_verify(config: RunConfig) -> VerifyReport:
    report = run_suites(config.mc.seed, settings.verify_trials)
    passed = sum(suite.passed for suite in report.suites)
    logger.info("%d of %d suites passed (seed %d)", passed, len(report.suites), config.mc.seed)
    return report
