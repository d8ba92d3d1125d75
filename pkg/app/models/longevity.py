from pydantic import Field

from app.models.base import FrozenModel, MonteCarloEstimate


class LongevityExampleParams(FrozenModel):
    """Liability index L of one population hedged with a bond on the index L~
    of a second one; (L, L~) bivariate normal under p."""

    mu1: float = Field(100.0, description="Mean of the liability index L")
    mu2: float = Field(100.0, description="Mean of the bond index L~")
    sigma1: float = Field(10.0, gt=0.0)
    sigma2: float = Field(10.0, gt=0.0)
    rho: float = Field(0.8, ge=-1.0, le=1.0)
    beta: float = Field(0.5, ge=0.0, description="Std-dev loading of the actuarial principle")
    kappa: float = Field(0.2, ge=0.0, description="Market price of longevity risk")
    p: float = Field(0.995, gt=0.0, lt=1.0, description="VaR confidence level")


class Example4Simulation(FrozenModel):
    """Monte Carlo counterparts of the closed forms, each with its standard error."""

    ts_actuarial_value: MonteCarloEstimate
    ts_financial_value: MonteCarloEstimate
    r1_mean: MonteCarloEstimate
    r1_var: MonteCarloEstimate
    r2_mean: MonteCarloEstimate
    r2_var: MonteCarloEstimate
    var_reduction: MonteCarloEstimate
