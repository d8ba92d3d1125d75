import numpy as np
import pytest

from app.services.rng import BLOCK_SIZE, standard_normals


def test_draws_do_not_depend_on_worker_count() -> None:
    count = 3 * BLOCK_SIZE + 17
    one = standard_normals(7, count, workers=1)
    many = standard_normals(7, count, workers=4)
    assert np.array_equal(one, many)


def test_draws_are_prefix_stable() -> None:
    long = standard_normals(7, 2 * BLOCK_SIZE + 5)
    short = standard_normals(7, BLOCK_SIZE + 3)
    assert np.array_equal(long[: short.size], short)


def test_streams_and_seeds_differ() -> None:
    base = standard_normals(7, 1000)
    assert not np.array_equal(base, standard_normals(7, 1000, stream=1))
    assert not np.array_equal(base, standard_normals(8, 1000))


def test_antithetic_pairs() -> None:
    draws = standard_normals(3, 11, antithetic=True)
    assert draws.size == 11
    assert np.array_equal(draws[1::2], -draws[0:10:2])
    assert np.array_equal(draws[0::2], standard_normals(3, 6))


def test_draws_look_standard_normal() -> None:
    draws = standard_normals(20190101, 200_000)
    assert np.all(np.isfinite(draws))
    assert draws.mean() == pytest.approx(0.0, abs=0.01)
    assert draws.std() == pytest.approx(1.0, abs=0.01)


def test_empty_request() -> None:
    assert standard_normals(1, 0).size == 0
