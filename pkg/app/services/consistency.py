import logging
from typing import Callable, Iterator, Optional

import numpy as np

from app.core.errors import ContractViolationError
from app.models.principle import ValuationPrinciple
from app.models.space import Claim, Coordinate, FiniteSpace, Measure
from app.models.verification import Counterexample
from app.services.finite_space import coordinates_independent, partition_by_coordinate
from app.services.spaces import measurable_claims, random_claims
from app.services.valuation import value

logger = logging.getLogger(__name__)

Valuation = Callable[[Claim], float]

_LABELS = {Coordinate.ACTUARIAL: "actuarial", Coordinate.FINANCIAL: "market"}


def find_weak_consistency_violation(
    valuation: Valuation,
    principle: ValuationPrinciple,
    space: FiniteSpace,
    coord: Coordinate,
    n_claims: int = 20,
    tol: float = 1e-8,
    seed: int = 0,
) -> Optional[Counterexample]:
    """Search for a claim depending on `coord` only whose value differs from `principle`."""
    rng = np.random.default_rng(seed)
    for claim in measurable_claims(space, coord, n_claims, rng):
        expected = value(principle, claim, space)
        actual = valuation(claim)
        if abs(actual - expected) > tol:
            return Counterexample(
                name=f"weak_{_LABELS[coord]}_consistency",
                space=space.to_dict(),
                claim=claim.values.tolist(),
                expected=expected,
                actual=actual,
            )
    return None


def _strong_pairs(
    space: FiniteSpace, coord: Coordinate, n_pairs: int, rng: np.random.Generator
) -> Iterator[tuple[Claim, Claim]]:
    partition = partition_by_coordinate(space, coord)
    # exhaustive: outcome indicators against cell indicators
    for j in range(space.size):
        for cell in partition.cells:
            yield Claim.indicator([j], space.size), Claim.indicator(cell, space.size)
    pure = measurable_claims(space, coord, n_pairs, rng)
    for claim, other in zip(random_claims(space, n_pairs, rng), pure):
        yield claim, other


def find_strong_consistency_violation(
    valuation: Valuation,
    principle: ValuationPrinciple,
    space: FiniteSpace,
    coord: Coordinate,
    n_pairs: int = 20,
    tol: float = 1e-8,
    seed: int = 0,
) -> Optional[Counterexample]:
    """Search for S and a pure claim S' with Pi[S + S'] != Pi[S] + pi[S']."""
    rng = np.random.default_rng(seed)
    for claim, pure in _strong_pairs(space, coord, n_pairs, rng):
        expected = valuation(claim) + value(principle, pure, space)
        actual = valuation(claim + pure)
        if abs(actual - expected) > tol:
            return Counterexample(
                name=f"strong_{_LABELS[coord]}_consistency",
                space=space.to_dict(),
                claim=claim.values.tolist(),
                other_claim=pure.values.tolist(),
                expected=expected,
                actual=actual,
            )
    return None


def is_weak_actuarial_consistent(
    valuation: Valuation,
    act: ValuationPrinciple,
    space: FiniteSpace,
    n_claims: int = 20,
    tol: float = 1e-8,
    seed: int = 0,
) -> bool:
    return (
        find_weak_consistency_violation(valuation, act, space, Coordinate.ACTUARIAL, n_claims, tol, seed)
        is None
    )


def is_strong_actuarial_consistent(
    valuation: Valuation,
    act: ValuationPrinciple,
    space: FiniteSpace,
    n_pairs: int = 20,
    tol: float = 1e-8,
    seed: int = 0,
) -> bool:
    return (
        find_strong_consistency_violation(valuation, act, space, Coordinate.ACTUARIAL, n_pairs, tol, seed)
        is None
    )


def is_weak_market_consistent(
    valuation: Valuation,
    fin: ValuationPrinciple,
    space: FiniteSpace,
    n_claims: int = 20,
    tol: float = 1e-8,
    seed: int = 0,
) -> bool:
    return (
        find_weak_consistency_violation(valuation, fin, space, Coordinate.FINANCIAL, n_claims, tol, seed)
        is None
    )


def is_strong_market_consistent(
    valuation: Valuation,
    fin: ValuationPrinciple,
    space: FiniteSpace,
    n_pairs: int = 20,
    tol: float = 1e-8,
    seed: int = 0,
) -> bool:
    return (
        find_strong_consistency_violation(valuation, fin, space, Coordinate.FINANCIAL, n_pairs, tol, seed)
        is None
    )


def find_orthogonal_violation(
    valuation: Valuation,
    fin: ValuationPrinciple,
    act: ValuationPrinciple,
    space: FiniteSpace,
    n_claims: int = 20,
    tol: float = 1e-8,
    seed: int = 0,
) -> Optional[Counterexample]:
    """On a p-independent space, pure financial claims must get pi1 and pure
    actuarial claims pi2."""
    if not coordinates_independent(space, Measure.P):
        raise ContractViolationError("orthogonal consistency needs p-independent coordinates")
    for coord, principle in ((Coordinate.FINANCIAL, fin), (Coordinate.ACTUARIAL, act)):
        found = find_weak_consistency_violation(valuation, principle, space, coord, n_claims, tol, seed)
        if found is not None:
            return found.model_copy(update={"name": "orthogonal_consistency"})
    return None


def is_orthogonal_consistent(
    valuation: Valuation,
    fin: ValuationPrinciple,
    act: ValuationPrinciple,
    space: FiniteSpace,
    n_claims: int = 20,
    tol: float = 1e-8,
    seed: int = 0,
) -> bool:
    return find_orthogonal_violation(valuation, fin, act, space, n_claims, tol, seed) is None
