"""Builders for finite spaces, and the claim samplers used by the consistency checks."""

from typing import Iterator, Sequence

import numpy as np

from app.models.examples import ComonotonicParams, HybridExampleParams
from app.models.space import Claim, Coordinate, Density, FiniteSpace
from app.services.finite_space import partition_by_coordinate

FINANCIAL_LEVELS = (50.0, 80.0, 100.0, 120.0, 200.0)
ACTUARIAL_LEVELS = (0.0, 1.0, 2.0)
CLAIM_SCALE = 100.0


def _normalized(weights: np.ndarray) -> np.ndarray:
    weights = np.clip(weights, 0.0, None)
    return weights / weights.sum()


def random_space(rng: np.random.Generator, max_outcomes: int = 12) -> FiniteSpace:
    """A small space with repeated coordinate levels, so both partitions are non-trivial
    most of the time, and strictly positive p and q weights."""
    n = int(rng.integers(2, max_outcomes + 1))
    n_fin = int(rng.integers(1, len(FINANCIAL_LEVELS) + 1))
    n_act = int(rng.integers(1, len(ACTUARIAL_LEVELS) + 1))
    return FiniteSpace(
        financial=rng.choice(FINANCIAL_LEVELS[:n_fin], size=n),
        actuarial=rng.choice(ACTUARIAL_LEVELS[:n_act], size=n),
        p=_normalized(rng.dirichlet(np.ones(n))),
        q=_normalized(rng.dirichlet(np.ones(n))),
    )


def product_space(
    financial_levels: Sequence[float],
    financial_p: Sequence[float],
    financial_q: Sequence[float],
    actuarial_levels: Sequence[float],
    actuarial_p: Sequence[float],
    actuarial_q: Sequence[float],
) -> FiniteSpace:
    """Every (financial, actuarial) pair, independent under both p and q."""
    fin = np.asarray(financial_levels, dtype=float)
    act = np.asarray(actuarial_levels, dtype=float)
    return FiniteSpace(
        financial=np.repeat(fin, act.size),
        actuarial=np.tile(act, fin.size),
        p=_normalized(np.outer(financial_p, actuarial_p).ravel()),
        q=_normalized(np.outer(financial_q, actuarial_q).ravel()),
    )


def random_product_space(rng: np.random.Generator) -> FiniteSpace:
    n_fin = int(rng.integers(1, len(FINANCIAL_LEVELS) + 1))
    n_act = int(rng.integers(1, len(ACTUARIAL_LEVELS) + 1))
    act_p = rng.dirichlet(np.ones(n_act))
    return product_space(
        FINANCIAL_LEVELS[:n_fin],
        rng.dirichlet(np.ones(n_fin)),
        rng.dirichlet(np.ones(n_fin)),
        ACTUARIAL_LEVELS[:n_act],
        act_p,
        act_p,
    )


def example5_space(params: HybridExampleParams) -> FiniteSpace:
    """Outcomes (Y, I) in the order (50, 0), (50, 1), (200, 0), (200, 1)."""
    return FiniteSpace(
        financial=[50.0, 50.0, 200.0, 200.0],
        actuarial=[0.0, 1.0, 0.0, 1.0],
        p=_normalized(np.array(params.p_table())),
        q=_normalized(np.array(params.q_table())),
    )


def example5_claim() -> Claim:
    """(Y - 100)+ * I on `example5_space`."""
    return Claim([0.0, 0.0, 0.0, 100.0])


def comonotonic_space(params: ComonotonicParams) -> FiniteSpace:
    return FiniteSpace(
        financial=[50.0, 200.0],
        actuarial=[0.0, 1.0],
        p=[1.0 - params.p, params.p],
        q=[1.0 - params.q, params.q],
    )


def random_claims(space: FiniteSpace, n_claims: int, rng: np.random.Generator) -> Iterator[Claim]:
    for _ in range(n_claims):
        yield Claim(CLAIM_SCALE * rng.standard_normal(space.size))


def measurable_claims(
    space: FiniteSpace, coord: Coordinate, n_random: int, rng: np.random.Generator
) -> Iterator[Claim]:
    """Claims depending on `coord` only: constants, cell indicators, then random ones."""
    partition = partition_by_coordinate(space, coord)
    for amount in (0.0, 1.0, -2.5):
        yield Claim.constant(amount, space.size)
    for cell in partition.cells:
        yield Claim.indicator(cell, space.size)
    for _ in range(n_random):
        yield Claim(partition.lift(CLAIM_SCALE * rng.standard_normal(len(partition.cells))))


def random_density(space: FiniteSpace, rng: np.random.Generator) -> Density:
    return Density.tilted(rng.gamma(1.0, size=space.size) + 1e-3, space)
