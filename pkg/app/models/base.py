from typing import Any, TypeVar

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.core.errors import DomainError

M = TypeVar("M", bound="FrozenModel")


class FrozenModel(BaseModel):
    """Immutable parameter record; NaN and infinities are rejected at construction."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False, extra="forbid")

    @classmethod
    def build(cls: type[M], **values: Any) -> M:
        """Construct the record, reporting invalid input as a DomainError naming the field."""
        try:
            return cls(**values)
        except ValidationError as exc:
            error = exc.errors()[0]
            field = ".".join(str(part) for part in error["loc"]) or cls.__name__
            raise DomainError(f"{cls.__name__}.{field}: {error['msg']}") from exc


class MonteCarloEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    estimate: float = Field(..., description="Sample mean")
    standard_error: float = Field(..., description="Standard error of the sample mean")
    n_paths: int = Field(..., ge=1)

    def within(self, target: float, z: float = 3.0) -> bool:
        return abs(self.estimate - target) <= z * self.standard_error


class NormalLaw(FrozenModel):
    mean: float
    var: float = Field(..., ge=0.0)

    @property
    def std(self) -> float:
        return self.var**0.5

    @property
    def is_degenerate(self) -> bool:
        return self.var == 0.0
