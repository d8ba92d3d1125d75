from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Any, Iterable, Sequence, Union

import numpy as np

from app.core.errors import DimensionError, DomainError

WEIGHT_TOL = 1e-12


class Measure(str, Enum):
    P = "p"
    Q = "q"


class Coordinate(str, Enum):
    FINANCIAL = "financial"
    ACTUARIAL = "actuarial"


def frozen_vector(values: Any, name: str) -> np.ndarray:
    """Copy `values` into a finite, read-only float vector."""
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be a vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains NaN or infinite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Outcome:
    financial_coord: float
    actuarial_coord: float
    p_weight: float
    q_weight: float


@dataclass(frozen=True, eq=False)
class FiniteSpace:
    """Enumerated outcomes with the real-world (p) and risk-neutral (q) weights
    stored side by side, plus the value of the traded and the non-traded
    risk driver in every outcome."""

    financial: np.ndarray
    actuarial: np.ndarray
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self) -> None:
        for name in ("financial", "actuarial", "p", "q"):
            object.__setattr__(self, name, frozen_vector(getattr(self, name), name))
        n = self.financial.size
        if n == 0:
            raise DomainError("a finite space needs at least one outcome")
        if any(getattr(self, name).size != n for name in ("actuarial", "p", "q")):
            raise DimensionError("coordinates and weights must have one entry per outcome")
        for name in ("p", "q"):
            weights = getattr(self, name)
            if np.any(weights < 0):
                raise DomainError(f"{name} weights must be non-negative")
            if abs(weights.sum() - 1.0) > WEIGHT_TOL:
                raise DomainError(f"{name} weights sum to {weights.sum()!r}, not 1")

    @classmethod
    def from_outcomes(cls, outcomes: Iterable[Outcome]) -> "FiniteSpace":
        rows = list(outcomes)
        return cls(
            financial=[o.financial_coord for o in rows],
            actuarial=[o.actuarial_coord for o in rows],
            p=[o.p_weight for o in rows],
            q=[o.q_weight for o in rows],
        )

    @property
    def size(self) -> int:
        return int(self.financial.size)

    def weights(self, measure: Measure) -> np.ndarray:
        return self.p if Measure(measure) is Measure.P else self.q

    def coordinate(self, coord: Coordinate) -> np.ndarray:
        return self.financial if Coordinate(coord) is Coordinate.FINANCIAL else self.actuarial

    def outcomes(self) -> list[Outcome]:
        return [
            Outcome(float(f), float(a), float(p), float(q))
            for f, a, p, q in zip(self.financial, self.actuarial, self.p, self.q)
        ]

    def equivalent_measures(self) -> bool:
        """Lint: p and q charge the same outcomes."""
        return bool(np.array_equal(self.p > 0, self.q > 0))

    def to_dict(self) -> dict[str, list[float]]:
        return {
            "financial": self.financial.tolist(),
            "actuarial": self.actuarial.tolist(),
            "p": self.p.tolist(),
            "q": self.q.tolist(),
        }


@dataclass(frozen=True, eq=False)
class Claim:
    """Payoff vector over the outcomes of one space."""

    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", frozen_vector(self.values, "claim"))

    @classmethod
    def constant(cls, amount: float, size: int) -> "Claim":
        return cls(np.full(size, float(amount)))

    @classmethod
    def indicator(cls, indices: Iterable[int], size: int) -> "Claim":
        values = np.zeros(size)
        values[list(indices)] = 1.0
        return cls(values)

    @property
    def size(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.size

    def _operand(self, other: Union["Claim", float]) -> Union[np.ndarray, float]:
        if isinstance(other, Claim):
            if other.size != self.size:
                raise DimensionError(f"claims of length {self.size} and {other.size} do not combine")
            return other.values
        return float(other)

    def __add__(self, other: Union["Claim", float]) -> "Claim":
        return Claim(self.values + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other: Union["Claim", float]) -> "Claim":
        return Claim(self.values - self._operand(other))

    def __rsub__(self, other: float) -> "Claim":
        return Claim(self._operand(other) - self.values)

    def __mul__(self, other: Union["Claim", float]) -> "Claim":
        return Claim(self.values * self._operand(other))

    __rmul__ = __mul__

    def __neg__(self) -> "Claim":
        return Claim(-self.values)

    def allclose(self, other: "Claim", tol: float = 1e-12) -> bool:
        return other.size == self.size and bool(np.all(np.abs(self.values - other.values) <= tol))


@dataclass(frozen=True, eq=False)
class Density:
    """Non-negative Radon-Nikodym weight against p; E^p[phi] = 1 is checked
    against a space with `check`."""

    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", frozen_vector(self.values, "density"))
        if np.any(self.values < 0):
            raise DomainError("density entries must be non-negative")

    @classmethod
    def for_space(cls, values: Any, space: FiniteSpace) -> "Density":
        density = cls(values)
        density.check(space)
        return density

    @classmethod
    def tilted(cls, tilt: Any, space: FiniteSpace) -> "Density":
        """Normalize a non-negative tilt so that it integrates to one under p."""
        raw = frozen_vector(tilt, "tilt")
        mass = float(np.dot(space.p, raw))
        if mass <= 0:
            raise DomainError("tilt has zero mass under p")
        return cls.for_space(raw / mass, space)

    @classmethod
    def from_measure(cls, weights: Any, space: FiniteSpace) -> "Density":
        """dQ/dP for a measure absolutely continuous with respect to p."""
        w = frozen_vector(weights, "weights")
        if np.any((space.p == 0) & (w > 0)):
            raise DomainError("measure is not absolutely continuous with respect to p")
        ratio = np.divide(w, space.p, out=np.zeros_like(w), where=space.p > 0)
        return cls.for_space(ratio, space)

    def check(self, space: FiniteSpace) -> None:
        if self.values.size != space.size:
            raise DimensionError(f"density has {self.values.size} entries, space has {space.size}")
        mass = float(np.dot(space.p, self.values))
        if abs(mass - 1.0) > WEIGHT_TOL:
            raise DomainError(f"density integrates to {mass!r} under p, not 1")


@dataclass(frozen=True)
class Partition:
    """Disjoint non-empty cells covering outcome indices 0..size-1."""

    cells: tuple[tuple[int, ...], ...]
    size: int

    def __post_init__(self) -> None:
        cells = tuple(tuple(int(i) for i in cell) for cell in self.cells)
        object.__setattr__(self, "cells", cells)
        if any(len(cell) == 0 for cell in cells):
            raise DomainError("partition cells must be non-empty")
        flat = [i for cell in cells for i in cell]
        if sorted(flat) != list(range(self.size)):
            raise DomainError("partition cells must be disjoint and cover every outcome")

    @classmethod
    def trivial(cls, size: int) -> "Partition":
        return cls((tuple(range(size)),), size)

    @classmethod
    def finest(cls, size: int) -> "Partition":
        return cls(tuple((i,) for i in range(size)), size)

    @cached_property
    def labels(self) -> np.ndarray:
        """Cell number of every outcome."""
        labels = np.empty(self.size, dtype=int)
        for k, cell in enumerate(self.cells):
            labels[list(cell)] = k
        labels.setflags(write=False)
        return labels

    def index_arrays(self) -> list[np.ndarray]:
        return [np.asarray(cell, dtype=int) for cell in self.cells]

    def lift(self, cell_values: Sequence[float]) -> np.ndarray:
        """Spread one value per cell onto the outcomes."""
        if len(cell_values) != len(self.cells):
            raise DimensionError("one value per cell expected")
        return np.asarray(cell_values, dtype=float)[self.labels]
