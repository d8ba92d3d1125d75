from typing import Optional

from pydantic import Field, field_validator

from app.models.base import FrozenModel
from app.models.gmmb import GmmbParams, McConfig, ScrPrinciple


def default_rho_grid() -> tuple[float, ...]:
    return tuple(round(-1.0 + 0.1 * k, 12) for k in range(21))


class RunConfig(FrozenModel):
    model: GmmbParams = Field(default_factory=GmmbParams)
    mc: McConfig = Field(default_factory=McConfig)
    scr_principle: ScrPrinciple = Field(default_factory=ScrPrinciple)
    coc_rate: float = Field(0.06, ge=0.0, description="Cost-of-capital rate i")
    rho_grid: tuple[float, ...] = Field(default_factory=default_rho_grid, min_length=1)
    output_path: Optional[str] = None

    @field_validator("rho_grid")
    @classmethod
    def _rho_in_range(cls, grid: tuple[float, ...]) -> tuple[float, ...]:
        for rho in grid:
            if not -1.0 <= rho <= 1.0:
                raise ValueError(f"correlation {rho!r} outside [-1, 1]")
        return grid
