import logging

import numpy as np

from app.core.errors import ConditioningError, DimensionError
from app.models.space import Claim, Coordinate, FiniteSpace, Measure, Partition

logger = logging.getLogger(__name__)


def check_claim(claim: Claim, space: FiniteSpace) -> None:
    if claim.size != space.size:
        raise DimensionError(f"claim has {claim.size} entries, space has {space.size} outcomes")


def check_partition(partition: Partition, space: FiniteSpace) -> None:
    if partition.size != space.size:
        raise DimensionError(f"partition covers {partition.size} outcomes, space has {space.size}")


def expectation(claim: Claim, measure: Measure, space: FiniteSpace) -> float:
    check_claim(claim, space)
    return float(np.dot(space.weights(measure), claim.values))


def partition_by_coordinate(space: FiniteSpace, coord: Coordinate) -> Partition:
    """Group outcomes sharing the same coordinate value, cells in ascending value order."""
    values = space.coordinate(coord)
    cells = tuple(tuple(np.flatnonzero(values == level).tolist()) for level in np.unique(values))
    return Partition(cells, space.size)


def cell_mass(weights: np.ndarray, index: np.ndarray) -> float:
    mass = float(weights[index].sum())
    if mass <= 0.0:
        raise ConditioningError(
            f"conditioning cell {index.tolist()} has zero weight", cell=index.tolist()
        )
    return mass


def conditional_expectation(
    claim: Claim, partition: Partition, measure: Measure, space: FiniteSpace
) -> Claim:
    check_claim(claim, space)
    check_partition(partition, space)
    weights = space.weights(measure)
    cell_values = []
    for index in partition.index_arrays():
        mass = cell_mass(weights, index)
        cell_values.append(float(np.dot(weights[index], claim.values[index])) / mass)
    return Claim(partition.lift(cell_values))


def is_measurable(claim: Claim, partition: Partition, tol: float = 1e-12) -> bool:
    if claim.size != partition.size:
        raise DimensionError(f"claim has {claim.size} entries, partition covers {partition.size}")
    for index in partition.index_arrays():
        cell = claim.values[index]
        if cell.max() - cell.min() > tol:
            return False
    return True


def coordinates_independent(space: FiniteSpace, measure: Measure, tol: float = 1e-12) -> bool:
    """True when the joint law of the two coordinates factorizes under `measure`."""
    weights = space.weights(measure)
    fin = partition_by_coordinate(space, Coordinate.FINANCIAL)
    act = partition_by_coordinate(space, Coordinate.ACTUARIAL)
    fin_mass = np.array([weights[idx].sum() for idx in fin.index_arrays()])
    act_mass = np.array([weights[idx].sum() for idx in act.index_arrays()])
    joint = np.zeros((len(fin.cells), len(act.cells)))
    np.add.at(joint, (fin.labels, act.labels), weights)
    return bool(np.all(np.abs(joint - np.outer(fin_mass, act_mass)) <= tol))
