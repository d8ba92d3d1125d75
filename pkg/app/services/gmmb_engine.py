import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import ndtr

from app.core.errors import ConfigurationError, DomainError
from app.models.base import MonteCarloEstimate, NormalLaw
from app.models.gmmb import GmmbParams, McConfig, ScenarioSummary, ValuationReport
from app.models.principle import StdDevPrinciple, TVaRPrinciple, ValuationPrinciple, describe
from app.models.space import Measure
from app.services.rng import standard_normals
from app.services.valuation import evaluate_weighted

logger = logging.getLogger(__name__)

DEFAULT_COC_RATE = 0.06
DEGENERATE_RHO0 = 1.0 - 1e-12

_STREAM_MORTALITY = 0
# the joint-simulation oracle draws from its own streams
_STREAM_ORACLE_MORTALITY, _STREAM_ORACLE_STOCK = 1, 2

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class _Moments:
    """Gaussian moments of the mortality block at maturity.

    X_T = int_0^T (e^{c(T-s)} - 1) dW2(s) has variance x_var and
    ln p = log_mean - (xi / c) X_T.
    """

    growth: float  # e^{cT} - 1
    log_mean: float
    log_var: float
    x_var: float


def _moments(params: GmmbParams) -> _Moments:
    c, T = params.c, params.T
    growth = math.expm1(c * T)
    a = -growth / c
    x_var = math.expm1(2.0 * c * T) / (2.0 * c) - 2.0 * growth / c + T
    return _Moments(
        growth=growth,
        log_mean=a * params.lambda0,
        log_var=(params.xi / c) ** 2 * x_var,
        x_var=x_var,
    )


def survival_probability(params: GmmbParams) -> float:
    m = _moments(params)
    return math.exp(m.log_mean + 0.5 * m.log_var)


def log_survival_law(params: GmmbParams) -> NormalLaw:
    m = _moments(params)
    return NormalLaw(mean=m.log_mean, var=m.log_var)


def rho0(params: GmmbParams) -> float:
    """Correlation between the stock's Brownian motion at T and X_T."""
    m = _moments(params)
    return params.rho * (m.growth / params.c - params.T) / math.sqrt(params.T * m.x_var)


def guarantee_bracket(spot: ArrayLike, K: float, r: float, total_vol: float, T: float) -> ArrayLike:
    """Discounted E[max(Y_T, K)] for a lognormal Y_T with forward spot e^{rT} and
    total volatility `total_vol`; the zero-volatility limit when total_vol is 0."""
    spot = np.asarray(spot, dtype=float)
    discount = math.exp(-r * T)
    if total_vol <= 0.0:
        return np.maximum(spot, discount * K)
    d1 = (np.log(spot / K) + r * T + 0.5 * total_vol**2) / total_vol
    d2 = d1 - total_vol
    return spot * ndtr(d1) + discount * K * ndtr(-d2)


def _unadjusted_bracket(params: GmmbParams) -> float:
    return float(guarantee_bracket(params.y0, params.K, params.r, params.sigma * math.sqrt(params.T), params.T))


def _check_rates(p_i: np.ndarray) -> None:
    if np.any(~np.isfinite(p_i)) or np.any(p_i <= 0.0) or np.any(p_i > 1.0):
        raise DomainError("survival rates must lie in (0, 1]")


def conditional_gmmb_price(params: GmmbParams, p_i: ArrayLike) -> ArrayLike:
    """Risk-neutral GMMB price given the realized survival rate p_i of the cohort."""
    rates = np.asarray(p_i, dtype=float)
    _check_rates(rates)
    correlation = rho0(params)
    if correlation != 0.0 and params.xi == 0.0:
        raise DomainError("xi = 0 leaves the stock adjustment undefined when rho != 0")
    m = _moments(params)
    if correlation == 0.0:
        spot = np.full_like(rates, params.y0)
    else:
        c, xi, T, sigma = params.c, params.xi, params.T, params.sigma
        shift = (c / xi) * np.log(rates) + (params.lambda0 / xi) * m.growth
        exponent = -sigma * correlation * math.sqrt(T) / math.sqrt(m.x_var) * shift
        spot = params.y0 * np.exp(exponent - 0.5 * sigma**2 * correlation**2 * T)
    if abs(correlation) >= DEGENERATE_RHO0:
        total_vol = 0.0
    else:
        total_vol = params.sigma * math.sqrt((1.0 - correlation**2) * params.T)
    price = rates * guarantee_bracket(spot, params.K, params.r, total_vol, params.T)
    return float(price) if np.ndim(p_i) == 0 else price


@dataclass(frozen=True)
class _Scenarios:
    rates: np.ndarray
    prices: np.ndarray
    clamped: int


def _survival_draws(params: GmmbParams, mc: McConfig) -> tuple[np.ndarray, int]:
    z = standard_normals(
        mc.seed, mc.n_paths, stream=_STREAM_MORTALITY, antithetic=mc.antithetic, workers=mc.n_threads_hint
    )
    law = log_survival_law(params)
    log_rates = law.mean - law.std * z
    clamped = int(np.count_nonzero(log_rates > 0.0))
    if clamped:
        logger.warning("%d of %d survival draws exceeded 1 and were clamped", clamped, mc.n_paths)
    return np.exp(np.minimum(log_rates, 0.0)), clamped


def sample_survival_rates(params: GmmbParams, mc: McConfig) -> np.ndarray:
    rates, _ = _survival_draws(params, mc)
    return rates


def _scenarios(params: GmmbParams, mc: McConfig) -> _Scenarios:
    rates, clamped = _survival_draws(params, mc)
    if params.xi == 0.0:
        # the intensity is deterministic, so the scenarios carry no information on the stock
        prices = rates * _unadjusted_bracket(params)
    else:
        prices = conditional_gmmb_price(params, rates)
    return _Scenarios(rates=rates, prices=prices, clamped=clamped)


def _mean_and_error(samples: np.ndarray, antithetic: bool) -> MonteCarloEstimate:
    n = samples.size
    mean = float(samples.mean())
    if antithetic and n >= 4:
        pairs = n // 2
        units = 0.5 * (samples[0 : 2 * pairs : 2] + samples[1 : 2 * pairs : 2])
    else:
        units = samples
    if units.size < 2:
        return MonteCarloEstimate(estimate=mean, standard_error=0.0, n_paths=n)
    return MonteCarloEstimate(
        estimate=mean, standard_error=float(units.std(ddof=1) / math.sqrt(units.size)), n_paths=n
    )


def best_estimate_with_error(params: GmmbParams, mc: McConfig) -> MonteCarloEstimate:
    return _mean_and_error(_scenarios(params, mc).prices, mc.antithetic)


def best_estimate(params: GmmbParams, mc: McConfig) -> float:
    """Real-world average of the conditional prices over the survival scenarios."""
    return best_estimate_with_error(params, mc).estimate


def _scr_from_prices(prices: np.ndarray, act: ValuationPrinciple) -> float:
    if not isinstance(act, (StdDevPrinciple, TVaRPrinciple)):
        raise ConfigurationError(f"SCR principle {describe(act)} is not supported")
    if np.ptp(prices) == 0.0:
        return 0.0
    weights = np.full(prices.size, 1.0 / prices.size)
    loaded = evaluate_weighted(act, prices, weights)
    return max(0.0, loaded - float(np.dot(weights, prices)))


def scr(params: GmmbParams, mc: McConfig, act: Optional[ValuationPrinciple] = None) -> float:
    """Loading of the actuarial principle on the scenario distribution of conditional prices."""
    return _scr_from_prices(_scenarios(params, mc).prices, act or StdDevPrinciple(1.0))


def _summary(prices: np.ndarray) -> ScenarioSummary:
    q01, q05, q50, q95, q99 = np.quantile(prices, [0.01, 0.05, 0.5, 0.95, 0.99])
    return ScenarioSummary(
        mean=float(prices.mean()),
        std=float(prices.std()),
        q01=float(q01),
        q05=float(q05),
        q50=float(q50),
        q95=float(q95),
        q99=float(q99),
    )


def coc_value(
    params: GmmbParams,
    mc: McConfig,
    act: Optional[ValuationPrinciple] = None,
    i: float = DEFAULT_COC_RATE,
) -> ValuationReport:
    """Best estimate plus the cost of holding the SCR at rate i."""
    if not math.isfinite(i) or i < 0.0:
        raise DomainError(f"cost-of-capital rate must be >= 0, got {i!r}")
    act = act or StdDevPrinciple(1.0)
    scenarios = _scenarios(params, mc)
    be = _mean_and_error(scenarios.prices, mc.antithetic)
    capital = _scr_from_prices(scenarios.prices, act)
    logger.debug("rho=%g: BE=%.6f SCR=%.6f", params.rho, be.estimate, capital)
    return ValuationReport(
        best_estimate=be.estimate,
        standard_error=be.standard_error,
        scr=capital,
        coc_value=be.estimate + i * capital,
        coc_rate=i,
        bs_benchmark=brennan_schwartz_value(params),
        rho=params.rho,
        n_paths=mc.n_paths,
        seed=mc.seed,
        scr_principle=describe(act),
        clamped_paths=scenarios.clamped,
        scenario_summary=_summary(scenarios.prices),
    )


def brennan_schwartz_value(params: GmmbParams) -> float:
    """Price with mortality fully diversified: survival probability times the guarantee bracket."""
    return survival_probability(params) * _unadjusted_bracket(params)


def closed_form_best_estimate(params: GmmbParams) -> float:
    """Exact expectation of the discounted payoff under the joint Gaussian model.

    Conditioning the stock on ln p shifts its Brownian motion by
    Cov(ln p, W1(T)) = -(xi / c) * rho * ((e^{cT} - 1) / c - T).
    """
    m = _moments(params)
    covariance = -(params.xi / params.c) * params.rho * (m.growth / params.c - params.T)
    spot = params.y0 * math.exp(params.sigma * covariance)
    bracket = float(guarantee_bracket(spot, params.K, params.r, params.sigma * math.sqrt(params.T), params.T))
    return survival_probability(params) * bracket


def mc_oracle_be(params: GmmbParams, mc: McConfig, measure: Measure = Measure.Q) -> MonteCarloEstimate:
    """Joint simulation of (X_T, W1(T)) and the discounted payoff.

    Under q the stock drifts at r; `Measure.P` uses the real-world drift mu.
    """
    workers = mc.n_threads_hint
    z_mortality = standard_normals(
        mc.seed, mc.n_paths, stream=_STREAM_ORACLE_MORTALITY, antithetic=mc.antithetic, workers=workers
    )
    z_stock = standard_normals(
        mc.seed, mc.n_paths, stream=_STREAM_ORACLE_STOCK, antithetic=mc.antithetic, workers=workers
    )
    law = log_survival_law(params)
    rates = np.exp(np.minimum(law.mean - law.std * z_mortality, 0.0))
    correlation = rho0(params)
    T = params.T
    brownian = correlation * math.sqrt(T) * z_mortality + math.sqrt(T * max(0.0, 1.0 - correlation**2)) * z_stock
    drift = params.r if Measure(measure) is Measure.Q else params.mu
    stock = params.y0 * np.exp((drift - 0.5 * params.sigma**2) * T + params.sigma * brownian)
    payoff = math.exp(-params.r * T) * rates * np.maximum(stock, params.K)
    return _mean_and_error(payoff, mc.antithetic)
