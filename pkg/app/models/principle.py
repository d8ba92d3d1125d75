import math
from dataclasses import dataclass
from typing import Optional, Union

from app.core.errors import DomainError
from app.models.space import Density, Measure


@dataclass(frozen=True)
class LinearPrinciple:
    """Expectation under p, under q, or under the density-weighted p."""

    measure: Measure = Measure.P
    density: Optional[Density] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "measure", Measure(self.measure))


@dataclass(frozen=True)
class StdDevPrinciple:
    """E^p[S] + beta * sd^p[S]."""

    beta: float

    def __post_init__(self) -> None:
        beta = float(self.beta)
        if not math.isfinite(beta) or beta < 0:
            raise DomainError(f"std_dev beta must be finite and >= 0, got {self.beta!r}")
        object.__setattr__(self, "beta", beta)


@dataclass(frozen=True)
class CoherentPrinciple:
    """Worst case over a finite set of p-densities."""

    densities: tuple[Density, ...]

    def __post_init__(self) -> None:
        densities = tuple(self.densities)
        if not densities:
            raise DomainError("coherent principle needs at least one density")
        object.__setattr__(self, "densities", densities)


@dataclass(frozen=True)
class TVaRPrinciple:
    """Tail value-at-risk under p at confidence `level`."""

    level: float

    def __post_init__(self) -> None:
        level = float(self.level)
        if not 0.0 < level < 1.0:
            raise DomainError(f"tvar level must lie in (0, 1), got {self.level!r}")
        object.__setattr__(self, "level", level)


ValuationPrinciple = Union[LinearPrinciple, StdDevPrinciple, CoherentPrinciple, TVaRPrinciple]


def describe(principle: ValuationPrinciple) -> str:
    if isinstance(principle, LinearPrinciple):
        if principle.density is not None:
            return "linear(density)"
        return f"linear({principle.measure.value})"
    if isinstance(principle, StdDevPrinciple):
        return f"std_dev(beta={principle.beta:g})"
    if isinstance(principle, CoherentPrinciple):
        return f"coherent({len(principle.densities)} densities)"
    return f"tvar(level={principle.level:g})"
