from typing import Literal, Optional

from pydantic import Field, model_validator

from app.core.config import settings
from app.models.base import FrozenModel
from app.models.principle import StdDevPrinciple, TVaRPrinciple, ValuationPrinciple


class GmmbParams(FrozenModel):
    """Correlated GBM stock and non-mean-reverting OU mortality intensity.

    Defaults are the reference parameter set: c = 0.075, xi = 0.000597,
    lambda(0) = 0.0087, r = 2%, sigma = 20%, T = 10 years, at-the-money
    guarantee on a unit stock.
    """

    c: float = Field(0.075, gt=0.0, description="OU drift of the mortality intensity")
    xi: float = Field(0.000597, ge=0.0, description="OU volatility of the mortality intensity")
    lambda0: float = Field(0.0087, description="Initial mortality intensity")
    r: float = Field(0.02, description="Risk-free rate")
    sigma: float = Field(0.2, gt=0.0, description="Stock volatility")
    rho: float = Field(0.0, ge=-1.0, le=1.0, description="Stock / intensity correlation")
    T: float = Field(10.0, gt=0.0, description="Maturity in years")
    K: float = Field(1.0, gt=0.0, description="Guaranteed amount")
    y0: float = Field(1.0, gt=0.0, description="Initial stock price")
    mu: float = Field(0.05, description="Real-world stock drift; pricing never uses it")


class McConfig(FrozenModel):
    n_paths: int = Field(100_000, ge=1)
    seed: int = Field(default_factory=lambda: settings.default_seed, ge=0, lt=2**64)
    n_threads_hint: Optional[int] = Field(None, ge=1)
    antithetic: bool = False


class ScrPrinciple(FrozenModel):
    """Actuarial principle applied to the scenario distribution of conditional prices."""

    kind: Literal["std_dev", "tvar"] = "std_dev"
    beta: float = Field(1.0, ge=0.0)
    level: float = Field(0.95, gt=0.0, lt=1.0)

    def to_principle(self) -> ValuationPrinciple:
        if self.kind == "tvar":
            return TVaRPrinciple(self.level)
        return StdDevPrinciple(self.beta)


class ScenarioSummary(FrozenModel):
    mean: float
    std: float
    q01: float
    q05: float
    q50: float
    q95: float
    q99: float


class ValuationReport(FrozenModel):
    best_estimate: float
    standard_error: float = Field(..., ge=0.0)
    scr: float
    coc_value: float
    coc_rate: float = Field(..., ge=0.0)
    bs_benchmark: float
    rho: float
    n_paths: int
    seed: int
    scr_principle: str
    clamped_paths: int = Field(0, ge=0, description="Survival draws above 1 set to 1")
    scenario_summary: ScenarioSummary

    @model_validator(mode="after")
    def _check_identity(self) -> "ValuationReport":
        if self.coc_value != self.best_estimate + self.coc_rate * self.scr:
            raise ValueError("coc_value must equal best_estimate + coc_rate * scr")
        return self
