import logging
from functools import singledispatch
from typing import Callable, Optional

import numpy as np

from app.core.errors import ContractViolationError, DimensionError, HedgingError
from app.models.hedging import (
    CompositeHedger,
    Hedger,
    QuadraticHedger,
    RiskFreeFullValueHedger,
    TradedAssets,
    TradingStrategy,
)
from app.models.principle import ValuationPrinciple
from app.models.space import Claim, Coordinate, FiniteSpace
from app.models.verification import Counterexample
from app.services.finite_space import check_claim
from app.services.spaces import measurable_claims
from app.services.valuation import lemma33_decompose, two_step_actuarial, value

logger = logging.getLogger(__name__)

# relative singular value below which the Gram matrix counts as singular
GRAM_RCOND = 1e-12


def _check_market(assets: TradedAssets, space: FiniteSpace) -> None:
    if assets.outcome_count != space.size:
        raise DimensionError(f"asset payoffs have {assets.outcome_count} entries, space has {space.size}")


@singledispatch
def _hedge(hedger: object, claim: Claim, assets: TradedAssets, space: FiniteSpace) -> TradingStrategy:
    raise ContractViolationError(f"unknown hedger {type(hedger).__name__}")


@_hedge.register
def _(hedger: RiskFreeFullValueHedger, claim, assets, space) -> TradingStrategy:
    level = two_step_actuarial(hedger.fin, hedger.act, claim, space)
    return TradingStrategy.risk_free(level, assets.count)


@_hedge.register
def _(hedger: QuadraticHedger, claim, assets, space) -> TradingStrategy:
    root = np.sqrt(space.p)
    weighted = root[:, None] * assets.payoff_matrix()
    _, singular, right = np.linalg.svd(weighted)
    # eigenvalues of the Gram matrix E^p[Y_i Y_j]
    gram_eigen = np.zeros(assets.count)
    gram_eigen[: singular.size] = singular**2
    small = gram_eigen <= GRAM_RCOND * gram_eigen[0]
    if np.any(small):
        null_space = right[small]
        dependent = np.flatnonzero(np.any(np.abs(null_space) > 1e-8, axis=0)).tolist()
        raise HedgingError(f"asset payoffs {dependent} are linearly dependent under p", dependent)
    units, *_ = np.linalg.lstsq(weighted, root * claim.values, rcond=None)
    return TradingStrategy(units)


@_hedge.register
def _(hedger: CompositeHedger, claim, assets, space) -> TradingStrategy:
    _, hedgeable = lemma33_decompose(claim, hedger.act, space)
    return _hedge(hedger.base, hedgeable, assets, space)


def hedge(hedger: Hedger, claim: Claim, assets: TradedAssets, space: FiniteSpace) -> TradingStrategy:
    check_claim(claim, space)
    _check_market(assets, space)
    return _hedge(hedger, claim, assets, space)


def strategy_cost(
    strategy: TradingStrategy, assets: TradedAssets, fin: ValuationPrinciple, space: FiniteSpace
) -> float:
    """Time-0 cost at the quoted prices, or at the fin value of each payoff when unquoted."""
    if assets.prices_at_0 is not None:
        prices = assets.prices_at_0
    else:
        prices = np.array([value(fin, payoff, space) for payoff in assets.payoffs])
    return float(np.dot(strategy.units, prices))


def find_hedger_violation(
    hedger: Hedger,
    act: ValuationPrinciple,
    space: FiniteSpace,
    assets: TradedAssets,
    n_claims: int = 20,
    tol: float = 1e-8,
    seed: int = 0,
) -> Optional[Counterexample]:
    """An actuarial claim whose hedge is not (pi2[S], 0, ..., 0)."""
    rng = np.random.default_rng(seed)
    for claim in measurable_claims(space, Coordinate.ACTUARIAL, n_claims, rng):
        units = hedge(hedger, claim, assets, space).units
        target = TradingStrategy.risk_free(value(act, claim, space), assets.count).units
        if np.max(np.abs(units - target)) > tol:
            return Counterexample(
                name="actuarial_consistent_hedger",
                space=space.to_dict(),
                claim=claim.values.tolist(),
                expected=float(target[0]),
                actual=float(units[0]),
                detail=f"strategy {units.tolist()}",
            )
    return None


def is_actuarial_consistent_hedger(
    hedger: Hedger,
    act: ValuationPrinciple,
    space: FiniteSpace,
    assets: TradedAssets,
    n_claims: int = 20,
    tol: float = 1e-8,
    seed: int = 0,
) -> bool:
    return find_hedger_violation(hedger, act, space, assets, n_claims, tol, seed) is None


def hedge_based_value(
    hedger: Hedger,
    fin: ValuationPrinciple,
    act: ValuationPrinciple,
    claim: Claim,
    assets: TradedAssets,
    space: FiniteSpace,
    residual: Optional[Callable[[Claim], float]] = None,
    tol: float = 1e-8,
) -> float:
    """Cost of the hedge plus the actuarial value of what it leaves behind."""
    if not is_actuarial_consistent_hedger(hedger, act, space, assets, tol=tol):
        raise ContractViolationError(f"{type(hedger).__name__} is not actuarial-consistent")
    strategy = hedge(hedger, claim, assets, space)
    leftover = claim - assets.strategy_payoff(strategy)
    residual_value = residual(leftover) if residual is not None else value(act, leftover, space)
    return strategy_cost(strategy, assets, fin, space) + residual_value
