import numpy as np
import pytest

from app.core.errors import ContractViolationError, DimensionError, DomainError, HedgingError
from app.models.hedging import (
    CompositeHedger,
    QuadraticHedger,
    RiskFreeFullValueHedger,
    TradedAssets,
    TradingStrategy,
)
from app.models.principle import LinearPrinciple, StdDevPrinciple
from app.models.space import Claim, FiniteSpace, Measure
from app.services.hedging import (
    hedge,
    hedge_based_value,
    is_actuarial_consistent_hedger,
    strategy_cost,
)
from app.services.spaces import product_space
from app.services.valuation import two_step_actuarial, value

SKEWED = FiniteSpace(
    financial=[50.0, 80.0, 120.0, 200.0],
    actuarial=[0.0, 1.0, 0.0, 1.0],
    p=[0.1, 0.2, 0.3, 0.4],
    q=[0.25, 0.25, 0.25, 0.25],
)
CORRELATED = FiniteSpace(
    financial=[50.0, 50.0, 200.0, 200.0],
    actuarial=[0.0, 1.0, 0.0, 1.0],
    p=[0.4, 0.1, 0.1, 0.4],
    q=[0.3, 0.2, 0.2, 0.3],
)
FIN, ACT = LinearPrinciple(Measure.Q), StdDevPrinciple(0.5)


def _market(space: FiniteSpace, prices=None) -> TradedAssets:
    return TradedAssets((Claim.constant(1.0, space.size), Claim(space.financial)), prices)


def test_quadratic_hedge_solves_normal_equations() -> None:
    claim = Claim([0.0, 0.0, 100.0, 100.0])
    strategy = hedge(QuadraticHedger(), claim, _market(SKEWED), SKEWED)
    y, s, p = SKEWED.financial, claim.values, SKEWED.p
    mean_y, mean_s = float(p @ y), float(p @ s)
    slope = float(p @ ((y - mean_y) * (s - mean_s))) / float(p @ ((y - mean_y) ** 2))
    assert strategy.units == pytest.approx([mean_s - slope * mean_y, slope])


def test_quadratic_residual_is_orthogonal_to_assets() -> None:
    assets = _market(SKEWED)
    claim = Claim([3.0, -1.0, 7.0, 2.0])
    strategy = hedge(QuadraticHedger(), claim, assets, SKEWED)
    residual = claim - assets.strategy_payoff(strategy)
    for payoff in assets.payoffs:
        assert float(SKEWED.p @ (residual.values * payoff.values)) == pytest.approx(0.0, abs=1e-9)


def test_quadratic_hedge_replicates_traded_payoff() -> None:
    strategy = hedge(QuadraticHedger(), Claim(SKEWED.financial), _market(SKEWED), SKEWED)
    assert strategy.units == pytest.approx([0.0, 1.0], abs=1e-9)


def test_quadratic_hedge_translation() -> None:
    assets = _market(SKEWED)
    claim = Claim([3.0, -1.0, 7.0, 2.0])
    base = hedge(QuadraticHedger(), claim, assets, SKEWED).units
    shifted = hedge(QuadraticHedger(), claim + 5.0, assets, SKEWED).units
    assert shifted == pytest.approx(base + np.array([5.0, 0.0]))


def test_quadratic_hedge_singular_gram() -> None:
    y = Claim(SKEWED.financial)
    assets = TradedAssets((Claim.constant(1.0, 4), y, 2.0 * y))
    with pytest.raises(HedgingError) as info:
        hedge(QuadraticHedger(), Claim([1.0, 2.0, 3.0, 4.0]), assets, SKEWED)
    assert info.value.dependent_assets == (1, 2)


def test_zero_claim_has_zero_hedge() -> None:
    zero = Claim.constant(0.0, 4)
    assets = _market(SKEWED)
    for hedger in (QuadraticHedger(), RiskFreeFullValueHedger(FIN, ACT), CompositeHedger(QuadraticHedger(), ACT)):
        assert hedge(hedger, zero, assets, SKEWED).units == pytest.approx([0.0, 0.0], abs=1e-12)


def test_risk_free_full_value_hedger() -> None:
    claim = Claim([0.0, 0.0, 100.0, 100.0])
    strategy = hedge(RiskFreeFullValueHedger(FIN, ACT), claim, _market(SKEWED), SKEWED)
    assert strategy.is_risk_free()
    assert strategy.units[0] == pytest.approx(two_step_actuarial(FIN, ACT, claim, SKEWED))


def test_composite_hedger_on_actuarial_claim() -> None:
    claim = Claim(CORRELATED.actuarial * 10.0)
    strategy = hedge(CompositeHedger(QuadraticHedger(), ACT), claim, _market(CORRELATED), CORRELATED)
    assert strategy.units == pytest.approx([value(ACT, claim, CORRELATED), 0.0], abs=1e-9)


def test_actuarial_consistency_of_hedgers() -> None:
    assets = _market(CORRELATED)
    assert is_actuarial_consistent_hedger(RiskFreeFullValueHedger(FIN, ACT), ACT, CORRELATED, assets)
    assert is_actuarial_consistent_hedger(CompositeHedger(QuadraticHedger(), ACT), ACT, CORRELATED, assets)
    assert not is_actuarial_consistent_hedger(QuadraticHedger(), ACT, CORRELATED, assets)


def test_hedge_based_value_rejects_inconsistent_hedger() -> None:
    with pytest.raises(ContractViolationError):
        hedge_based_value(QuadraticHedger(), FIN, ACT, Claim([1.0, 2.0, 3.0, 4.0]), _market(CORRELATED), CORRELATED)


def test_hedge_based_value_of_actuarial_claim() -> None:
    claim = Claim(CORRELATED.actuarial * 10.0)
    hedger = CompositeHedger(QuadraticHedger(), ACT)
    assert hedge_based_value(hedger, FIN, ACT, claim, _market(CORRELATED), CORRELATED) == pytest.approx(
        value(ACT, claim, CORRELATED), abs=1e-9
    )


def test_hedge_based_value_of_replicable_claim() -> None:
    space = product_space([50.0, 200.0], [0.5, 0.5], [0.6, 0.4], [0.0, 1.0], [0.2, 0.8], [0.2, 0.8])
    hedger = CompositeHedger(QuadraticHedger(), LinearPrinciple(Measure.P))
    assets = _market(space, [1.0, 110.0])
    claim = Claim(space.financial)
    assert hedge_based_value(hedger, FIN, LinearPrinciple(Measure.P), claim, assets, space) == pytest.approx(110.0)


def test_hedge_based_value_with_custom_residual() -> None:
    hedger = RiskFreeFullValueHedger(FIN, ACT)
    claim = Claim([0.0, 0.0, 100.0, 100.0])
    seen = []

    def residual(leftover: Claim) -> float:
        seen.append(leftover)
        return 0.0

    result = hedge_based_value(hedger, FIN, ACT, claim, _market(SKEWED), SKEWED, residual=residual)
    assert result == pytest.approx(two_step_actuarial(FIN, ACT, claim, SKEWED))
    assert len(seen) == 1


def test_strategy_cost_prices() -> None:
    strategy = TradingStrategy(np.array([2.0, 0.5]))
    quoted = _market(SKEWED, [1.0, 90.0])
    assert strategy_cost(strategy, quoted, FIN, SKEWED) == pytest.approx(47.0)
    unquoted = _market(SKEWED)
    expected = 2.0 + 0.5 * value(FIN, Claim(SKEWED.financial), SKEWED)
    assert strategy_cost(strategy, unquoted, FIN, SKEWED) == pytest.approx(expected)


def test_traded_assets_validation() -> None:
    with pytest.raises(DomainError):
        TradedAssets((Claim([1.0, 2.0]),))
    with pytest.raises(DomainError):
        TradedAssets((Claim([1.0, 1.0]), Claim([1.0, 2.0])), np.array([0.9, 1.0]))
    with pytest.raises(DimensionError):
        TradedAssets((Claim([1.0, 1.0]), Claim([1.0, 2.0, 3.0])))
    with pytest.raises(DimensionError):
        hedge(QuadraticHedger(), Claim([1.0, 2.0]), TradedAssets.risk_free_only(2), SKEWED)
