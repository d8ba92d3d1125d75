import json
import logging
import os
from typing import Any, Optional

from app.core.config import settings
from app.models.run_event import RunEvent

logger = logging.getLogger(__name__)


class RunLogService:
    """
    Append-only ledger of CLI runs.
    Each command appends one RunEvent as a JSON line; the directory is created
    on the first write. With no path configured the ledger is switched off.
    Args:
      file_path (Optional[str]): Ledger file. Defaults to settings.run_log_path.
    """

    def __init__(self, file_path: Optional[str] = None) -> None:
        self.file_path = file_path if file_path is not None else settings.run_log_path

    def log(
        self,
        *,
        command: str,
        status: str = "success",
        seed: Optional[int] = None,
        exit_code: int = 0,
        message: Optional[str] = None,
        details: Optional[dict[str, Any]] = None,
    ) -> None:
        if not self.file_path:
            return
        event = RunEvent(
            command=command,  # type: ignore[arg-type]
            status=status,  # type: ignore[arg-type]
            seed=seed,
            exit_code=exit_code,
            message=message,
            details=details,
        )
        line = event.model_dump(mode="json")
        try:
            directory = os.path.dirname(self.file_path)
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(self.file_path, "a", encoding="utf-8") as f:
                f.write(json.dumps(line, ensure_ascii=False) + "\n")
        except OSError as e:
            # the ledger never decides the outcome of a run
            logger.warning("Could not write run log %s: %s", self.file_path, e)


run_log_service = RunLogService()
