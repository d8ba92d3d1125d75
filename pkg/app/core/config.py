import os
from typing import Optional


class Settings:
    """Application settings loaded from environment variables."""

    # App settings
    app_name: str = os.getenv("APP_NAME", "actuarial-valuation")
    debug: bool = os.getenv("DEBUG", "false").lower() in ("true", "1", "yes")

    # Monte Carlo defaults
    n_threads: int = int(os.getenv("N_THREADS", "1"))
    default_seed: int = int(os.getenv("DEFAULT_SEED", "20190101"))

    # Theorem suites
    verify_trials: int = int(os.getenv("VERIFY_TRIALS", "200"))

    # Run ledger (empty string disables it)
    run_log_path: Optional[str] = os.getenv("RUN_LOG_PATH", "logs/runs.jsonl") or None

    @classmethod
    def worker_count(cls, hint: Optional[int] = None) -> int:
        """Resolve the number of Monte Carlo workers."""
        return max(1, hint if hint is not None else cls.n_threads)


settings = Settings()
