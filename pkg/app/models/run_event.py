from datetime import datetime, timezone
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class RunEvent(BaseModel):
    timestamp: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
    command: Literal["table2", "coc", "verify", "examples"]
    status: Literal["success", "failure"]
    seed: Optional[int] = None
    exit_code: int = 0
    message: Optional[str] = None
    details: Optional[dict[str, Any]] = None
