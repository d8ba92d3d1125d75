import logging
import math
from typing import Optional

import numpy as np
from scipy.special import ndtri

from app.core.errors import DomainError
from app.models.base import MonteCarloEstimate, NormalLaw
from app.models.longevity import Example4Simulation, LongevityExampleParams
from app.services.rng import standard_normals

logger = logging.getLogger(__name__)

# streams of the counter-based generator reserved for this example
_STREAM_BOND, _STREAM_IDIOSYNCRATIC = 10, 11


def _hedge_ratio(params: LongevityExampleParams) -> float:
    """sqrt(1 - rho^2): share of the liability's volatility the bond cannot hedge."""
    return math.sqrt(max(0.0, 1.0 - params.rho * params.rho))


def ts_actuarial_value(params: LongevityExampleParams) -> float:
    return params.mu1 + params.beta * params.sigma1


def ts_financial_value(params: LongevityExampleParams) -> float:
    return (
        params.mu1
        - params.rho * params.sigma1 * params.kappa
        + params.beta * params.sigma1 * _hedge_ratio(params)
    )


def value_difference(params: LongevityExampleParams) -> float:
    return params.sigma1 * (params.beta * (_hedge_ratio(params) - 1.0) - params.rho * params.kappa)


def residual_laws(params: LongevityExampleParams) -> tuple[NormalLaw, NormalLaw]:
    """Residual loss laws without (R1) and with (R2) the longevity bond."""
    s = _hedge_ratio(params)
    r1 = NormalLaw(mean=-params.beta * params.sigma1, var=params.sigma1**2)
    r2 = NormalLaw(mean=-params.beta * params.sigma1 * s, var=(s * params.sigma1) ** 2)
    return r1, r2


def var_normal(law: NormalLaw, p: float) -> float:
    if not 0.0 < p < 1.0:
        raise DomainError(f"VaR level must lie in (0, 1), got {p!r}")
    if law.is_degenerate:
        return law.mean
    return law.mean + law.std * float(ndtri(p))


def var_reduction(params: LongevityExampleParams) -> float:
    """VaR_p[R2] - VaR_p[R1]; negative when the bond reduces the tail."""
    r1, r2 = residual_laws(params)
    return var_normal(r2, params.p) - var_normal(r1, params.p)


def invest_decision(params: LongevityExampleParams) -> bool:
    """Buy the bond iff the extra valuation cost is below the VaR it saves."""
    if not 0.0 < params.p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {params.p!r}")
    rhs = params.sigma1 * (float(ndtri(params.p)) - params.beta) * (_hedge_ratio(params) - 1.0)
    return value_difference(params) < rhs


def best_estimates_example4a(mu1: float, r: float, T: float, slope: float, bond_price: float) -> tuple[float, float]:
    """(BE, BE*): discounted expected index, and the cost of `slope` bonds when
    E[L | L~] = slope * L~ makes the bond the full investment."""
    if T < 0:
        raise DomainError(f"T must be >= 0, got {T!r}")
    return math.exp(-r * T) * mu1, slope * bond_price


def _estimate(samples: np.ndarray) -> MonteCarloEstimate:
    n = samples.size
    return MonteCarloEstimate(
        estimate=float(samples.mean()),
        standard_error=float(samples.std(ddof=1) / math.sqrt(n)),
        n_paths=n,
    )


def _variance_estimate(samples: np.ndarray) -> MonteCarloEstimate:
    n = samples.size
    var = float(samples.var(ddof=1))
    return MonteCarloEstimate(estimate=var, standard_error=var * math.sqrt(2.0 / (n - 1)), n_paths=n)


def _quantile_se(sd: float, p: float, n: int) -> float:
    z = float(ndtri(p))
    density = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    return sd * math.sqrt(p * (1.0 - p) / n) / density


def simulate_example4(
    params: LongevityExampleParams, n_paths: int, seed: int, workers: Optional[int] = None
) -> Example4Simulation:
    """Simulate (L, L~) under p and estimate every closed-form quantity."""
    if n_paths < 2:
        raise DomainError("the example needs at least two paths")
    z_bond = standard_normals(seed, n_paths, stream=_STREAM_BOND, workers=workers)
    z_own = standard_normals(seed, n_paths, stream=_STREAM_IDIOSYNCRATIC, workers=workers)
    s = _hedge_ratio(params)
    bond_index = params.mu2 + params.sigma2 * z_bond
    liability = params.mu1 + params.sigma1 * (params.rho * z_bond + s * z_own)

    sd = float(liability.std(ddof=1))
    ts_act = _estimate(liability + params.beta * sd)
    ts_act = ts_act.model_copy(
        update={"standard_error": params.sigma1 * math.sqrt((1.0 + 0.5 * params.beta**2) / n_paths)}
    )

    # q shifts the bond index by -sigma2 * kappa; weights are dq/dp on z_bond
    density = np.exp(-params.kappa * z_bond - 0.5 * params.kappa**2)
    slope, intercept = np.polyfit(bond_index, liability, 1)
    spread = liability - (intercept + slope * bond_index)
    residual_sd = float(spread.std(ddof=2)) if n_paths > 2 else 0.0
    ts_fin = _estimate(density * liability + params.beta * residual_sd)
    ts_fin = ts_fin.model_copy(
        update={
            "standard_error": math.hypot(
                ts_fin.standard_error, params.beta * params.sigma1 * s / math.sqrt(2.0 * n_paths)
            )
        }
    )

    r1 = liability - ts_actuarial_value(params)
    hedged_mean = params.mu1 + params.rho * params.sigma1 / params.sigma2 * (bond_index - params.mu2)
    r2 = liability - (hedged_mean + params.beta * params.sigma1 * s)

    q1 = float(np.quantile(r1, params.p))
    q2 = float(np.quantile(r2, params.p))
    reduction_se = _quantile_se(params.sigma1, params.p, n_paths) + _quantile_se(
        params.sigma1 * s, params.p, n_paths
    )
    logger.debug("simulated example 4 on %d paths (seed %d)", n_paths, seed)
    return Example4Simulation(
        ts_actuarial_value=ts_act,
        ts_financial_value=ts_fin,
        r1_mean=_estimate(r1),
        r1_var=_variance_estimate(r1),
        r2_mean=_estimate(r2),
        r2_var=_variance_estimate(r2),
        var_reduction=MonteCarloEstimate(
            estimate=q2 - q1, standard_error=reduction_se, n_paths=n_paths
        ),
    )
