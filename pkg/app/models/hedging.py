from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from app.core.errors import DimensionError, DomainError
from app.models.principle import ValuationPrinciple
from app.models.space import Claim, frozen_vector


@dataclass(frozen=True, eq=False)
class TradedAssets:
    """Asset payoffs at maturity; asset 0 is the bank account paying 1 for a price of 1."""

    payoffs: tuple[Claim, ...]
    prices_at_0: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        payoffs = tuple(self.payoffs)
        if not payoffs:
            raise DomainError("at least the risk-free asset is required")
        size = payoffs[0].size
        if any(payoff.size != size for payoff in payoffs):
            raise DimensionError("all asset payoffs must live on the same space")
        if not np.all(payoffs[0].values == 1.0):
            raise DomainError("asset 0 must be the risk-free account paying 1 in every outcome")
        object.__setattr__(self, "payoffs", payoffs)
        if self.prices_at_0 is not None:
            prices = frozen_vector(self.prices_at_0, "prices_at_0")
            if prices.size != len(payoffs):
                raise DimensionError("one price per traded asset expected")
            if prices[0] != 1.0:
                raise DomainError("the risk-free account costs 1")
            object.__setattr__(self, "prices_at_0", prices)

    @classmethod
    def risk_free_only(cls, size: int) -> "TradedAssets":
        return cls((Claim.constant(1.0, size),), np.array([1.0]))

    @property
    def count(self) -> int:
        return len(self.payoffs)

    @property
    def outcome_count(self) -> int:
        return self.payoffs[0].size

    def payoff_matrix(self) -> np.ndarray:
        """Outcomes by assets."""
        return np.column_stack([payoff.values for payoff in self.payoffs])

    def strategy_payoff(self, strategy: "TradingStrategy") -> Claim:
        if strategy.units.size != self.count:
            raise DimensionError(f"strategy holds {strategy.units.size} assets, market has {self.count}")
        return Claim(self.payoff_matrix() @ strategy.units)


@dataclass(frozen=True, eq=False)
class TradingStrategy:
    units: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "units", frozen_vector(self.units, "units"))

    @classmethod
    def risk_free(cls, amount: float, n_assets: int) -> "TradingStrategy":
        units = np.zeros(n_assets)
        units[0] = amount
        return cls(units)

    def is_risk_free(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.units[1:]) <= tol))


@dataclass(frozen=True)
class RiskFreeFullValueHedger:
    """Puts the full two-step actuarial value into the bank account."""

    fin: ValuationPrinciple
    act: ValuationPrinciple


@dataclass(frozen=True)
class QuadraticHedger:
    """Least-squares replication under p."""


@dataclass(frozen=True)
class CompositeHedger:
    """Runs `base` on the part of the claim left after removing its actuarial
    component, which makes any base hedger actuarial-consistent."""

    base: "Hedger"
    act: ValuationPrinciple


Hedger = Union[RiskFreeFullValueHedger, QuadraticHedger, CompositeHedger]
