import logging
import math
from functools import singledispatch

import numpy as np

from app.core.errors import ConditioningError, DimensionError, DomainError
from app.models.examples import HybridExampleParams
from app.models.principle import (
    CoherentPrinciple,
    LinearPrinciple,
    StdDevPrinciple,
    TVaRPrinciple,
    ValuationPrinciple,
)
from app.models.space import Claim, Coordinate, FiniteSpace, Measure, Partition
from app.services.finite_space import (
    check_claim,
    check_partition,
    conditional_expectation,
    is_measurable,
    partition_by_coordinate,
)

logger = logging.getLogger(__name__)


def _local_mass(weights: np.ndarray, index: np.ndarray) -> float:
    """Total of weights already restricted to the cell listed in `index`."""
    mass = float(weights.sum())
    if mass <= 0.0:
        raise ConditioningError(
            f"conditioning cell {index.tolist()} has zero weight", cell=index.tolist()
        )
    return mass


@singledispatch
def _evaluate(
    principle: object, values: np.ndarray, p: np.ndarray, q: np.ndarray, index: np.ndarray
) -> float:
    """Apply `principle` to `values` under the cell-renormalized weights.

    `p` and `q` are the raw weights of the outcomes listed in `index`; densities
    are looked up through `index`.
    """
    raise DomainError(f"unsupported valuation principle {type(principle).__name__}")


@_evaluate.register
def _(principle: LinearPrinciple, values, p, q, index) -> float:
    if principle.density is not None:
        weights = p * principle.density.values[index]
    else:
        weights = p if principle.measure is Measure.P else q
    mass = _local_mass(weights, index)
    return float(np.dot(weights, values)) / mass


@_evaluate.register
def _(principle: StdDevPrinciple, values, p, q, index) -> float:
    mass = _local_mass(p, index)
    mean = float(np.dot(p, values)) / mass
    var = float(np.dot(p, (values - mean) ** 2)) / mass
    return mean + principle.beta * math.sqrt(max(var, 0.0))


@_evaluate.register
def _(principle: CoherentPrinciple, values, p, q, index) -> float:
    best = None
    for density in principle.densities:
        weights = p * density.values[index]
        mass = float(weights.sum())
        # densities vanishing on the cell say nothing about it
        if mass <= 0.0:
            continue
        candidate = float(np.dot(weights, values)) / mass
        if best is None or candidate > best:
            best = candidate
    if best is None:
        raise ConditioningError(
            f"no density charges conditioning cell {index.tolist()}", cell=index.tolist()
        )
    return best


@_evaluate.register
def _(principle: TVaRPrinciple, values, p, q, index) -> float:
    mass = _local_mass(p, index)
    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    upper = np.cumsum(p[order]) / mass
    upper[-1] = 1.0
    lower = np.concatenate(([0.0], upper[:-1]))
    level = principle.level
    overlap = np.clip(upper - np.maximum(lower, level), 0.0, None)
    return float(np.dot(sorted_values, overlap)) / (1.0 - level)


def _check_principle(principle: ValuationPrinciple, space: FiniteSpace) -> None:
    if isinstance(principle, LinearPrinciple) and principle.density is not None:
        principle.density.check(space)
    if isinstance(principle, CoherentPrinciple):
        for density in principle.densities:
            density.check(space)


def evaluate_weighted(principle: ValuationPrinciple, values: np.ndarray, weights: np.ndarray) -> float:
    """Value a sample under an explicit weight vector used as both p and q."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if values.shape != weights.shape:
        raise DimensionError("values and weights must have the same length")
    return _evaluate(principle, values, weights, weights, np.arange(values.size))


def value(principle: ValuationPrinciple, claim: Claim, space: FiniteSpace) -> float:
    check_claim(claim, space)
    _check_principle(principle, space)
    return _evaluate(principle, claim.values, space.p, space.q, np.arange(space.size))


def conditional_value(
    principle: ValuationPrinciple, claim: Claim, partition: Partition, space: FiniteSpace
) -> Claim:
    check_claim(claim, space)
    check_partition(partition, space)
    _check_principle(principle, space)
    cell_values = [
        _evaluate(principle, claim.values[index], space.p[index], space.q[index], index)
        for index in partition.index_arrays()
    ]
    return Claim(partition.lift(cell_values))


def two_step_actuarial(
    fin: ValuationPrinciple, act: ValuationPrinciple, claim: Claim, space: FiniteSpace
) -> float:
    """pi2[ pi1[S | actuarial information] ]."""
    partition = partition_by_coordinate(space, Coordinate.ACTUARIAL)
    return value(act, conditional_value(fin, claim, partition, space), space)


def two_step_financial(
    fin: ValuationPrinciple, act: ValuationPrinciple, claim: Claim, space: FiniteSpace
) -> float:
    """pi1[ pi2[S | financial information] ]."""
    partition = partition_by_coordinate(space, Coordinate.FINANCIAL)
    return value(fin, conditional_value(act, claim, partition, space), space)


def lemma33_decompose(
    claim: Claim, act: ValuationPrinciple, space: FiniteSpace
) -> tuple[Claim, Claim]:
    """Split S into an actuarial part H2 = E^p[S | actuarial] - pi2[S] and H1 = S - H2."""
    partition = partition_by_coordinate(space, Coordinate.ACTUARIAL)
    h2 = conditional_expectation(claim, partition, Measure.P, space) - value(act, claim, space)
    return h2, claim - h2


def product_formula_check(
    fin: ValuationPrinciple,
    act: ValuationPrinciple,
    s1: Claim,
    s2: Claim,
    space: FiniteSpace,
    tol: float = 1e-8,
) -> bool:
    """Fairness of the two-step actuarial value on the product S1 * S2."""
    fin_partition = partition_by_coordinate(space, Coordinate.FINANCIAL)
    act_partition = partition_by_coordinate(space, Coordinate.ACTUARIAL)
    if not is_measurable(s1, fin_partition) or not is_measurable(s2, act_partition):
        logger.debug("product formula skipped: factors are not pure claims")
        return False
    combined = two_step_actuarial(fin, act, s1 * s2, space)
    product = value(fin, s1, space) * value(act, s2, space)
    return abs(combined - product) <= tol


def _probability(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or not 0.0 <= x <= 1.0:
        raise DomainError(f"{name} must be a probability, got {x!r}")
    return x


def _bernoulli_sd(x: float) -> float:
    return math.sqrt(x * (1.0 - x))


def two_step_difference_example5(
    p_I: float,
    p_Y: float,
    p_I_given_up: float,
    p_Y_given_alive: float,
    beta: float,
    kappa: float,
) -> float:
    """Two-step actuarial minus two-step financial value of (Y - 100)+ * I on the
    two-state stock / two-state survival table, the stock moving 50 -> 200
    with a constant risk premium kappa."""
    p_I = _probability("p_I", p_I)
    p_Y = _probability("p_Y", p_Y)
    p_I_given_up = _probability("p_I_given_up", p_I_given_up)
    p_Y_given_alive = _probability("p_Y_given_alive", p_Y_given_alive)
    if not math.isfinite(beta) or beta < 0:
        raise DomainError(f"beta must be finite and >= 0, got {beta!r}")
    if not math.isfinite(kappa):
        raise DomainError(f"kappa must be finite, got {kappa!r}")
    if abs(p_I_given_up * p_Y - p_Y_given_alive * p_I) > 1e-9:
        raise DomainError("p_I_given_up * p_Y must equal p_Y_given_alive * p_I")
    _probability("q_Y", p_Y + kappa)
    _probability("q_Y_given_alive", p_Y_given_alive + kappa)
    sd_I = _bernoulli_sd(p_I)
    sd_up = _bernoulli_sd(p_I_given_up)
    return (
        100.0 * kappa * (p_I - p_I_given_up)
        + 100.0 * kappa * beta * (sd_I - sd_up)
        + 100.0 * p_Y_given_alive * beta * sd_I
        - 100.0 * p_Y * beta * sd_up
    )


def example5_closed_forms(params: HybridExampleParams) -> tuple[float, float]:
    """(two-step financial, two-step actuarial) value of (Y - 100)+ * I in closed form."""
    financial = 100.0 * params.q_Y * (
        params.p_I_given_up + params.beta * _bernoulli_sd(params.p_I_given_up)
    )
    actuarial = 100.0 * params.q_Y_given_alive * (params.p_I + params.beta * _bernoulli_sd(params.p_I))
    return financial, actuarial
