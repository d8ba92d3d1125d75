import math

import numpy as np
import pytest
from scipy.special import ndtri

from app.core.errors import DomainError
from app.models.base import NormalLaw
from app.models.longevity import LongevityExampleParams
from app.services.longevity import (
    best_estimates_example4a,
    invest_decision,
    residual_laws,
    simulate_example4,
    ts_actuarial_value,
    ts_financial_value,
    value_difference,
    var_normal,
    var_reduction,
)

DEFAULT = LongevityExampleParams()


def test_ts_actuarial_value() -> None:
    assert ts_actuarial_value(DEFAULT) == pytest.approx(105.0)
    assert ts_actuarial_value(DEFAULT.model_copy(update={"beta": 0.0})) == pytest.approx(100.0)
    for rho in (-1.0, 0.0, 0.3):
        params = DEFAULT.model_copy(update={"rho": rho, "kappa": 1.0})
        assert ts_actuarial_value(params) == pytest.approx(105.0)


def test_ts_financial_value_limits() -> None:
    assert ts_financial_value(DEFAULT.model_copy(update={"rho": 0.0})) == pytest.approx(105.0)
    assert ts_financial_value(DEFAULT.model_copy(update={"rho": 1.0})) == pytest.approx(100.0 - 10.0 * 0.2)
    assert ts_financial_value(DEFAULT.model_copy(update={"rho": -1.0})) == pytest.approx(100.0 + 10.0 * 0.2)


def test_value_difference() -> None:
    assert value_difference(DEFAULT.model_copy(update={"rho": 0.0})) == pytest.approx(0.0, abs=1e-12)
    assert value_difference(DEFAULT.model_copy(update={"rho": 1.0, "kappa": 0.0})) == pytest.approx(-5.0)
    rng = np.random.default_rng(41)
    for _ in range(200):
        params = LongevityExampleParams(
            sigma1=float(rng.uniform(1.0, 20.0)),
            rho=float(rng.uniform(-1.0, 1.0)),
            beta=float(rng.uniform(0.0, 2.0)),
            kappa=float(rng.uniform(0.0, 1.0)),
        )
        direct = ts_financial_value(params) - ts_actuarial_value(params)
        assert value_difference(params) == pytest.approx(direct, abs=1e-12 * 100.0)


def test_residual_laws() -> None:
    r1, r2 = residual_laws(DEFAULT.model_copy(update={"rho": 0.0}))
    assert r1 == r2
    assert r1 == NormalLaw(mean=-5.0, var=100.0)
    for rho in (-1.0, 1.0):
        _, hedged = residual_laws(DEFAULT.model_copy(update={"rho": rho}))
        assert hedged.is_degenerate
        assert hedged.mean == pytest.approx(0.0, abs=1e-12)


def test_var_normal() -> None:
    assert var_normal(NormalLaw(mean=2.0, var=0.0), 0.99) == 2.0
    law = NormalLaw(mean=1.0, var=4.0)
    assert var_normal(law, 0.975) == pytest.approx(1.0 + 2.0 * 1.959963985, rel=1e-9)
    with pytest.raises(DomainError):
        var_normal(law, 1.0)


def test_var_reduction_identity() -> None:
    s = math.sqrt(1.0 - 0.8**2)
    expected = 10.0 * (float(ndtri(0.995)) - 0.5) * (s - 1.0)
    assert var_reduction(DEFAULT) == pytest.approx(expected)
    assert var_reduction(DEFAULT.model_copy(update={"rho": 0.0})) == pytest.approx(0.0, abs=1e-12)


def test_invest_decision() -> None:
    assert not invest_decision(DEFAULT.model_copy(update={"kappa": 0.0, "beta": 0.0}))
    assert not invest_decision(DEFAULT.model_copy(update={"rho": 0.0}))
    assert not invest_decision(DEFAULT)
    assert invest_decision(DEFAULT.model_copy(update={"kappa": 1.0}))


def test_invest_decision_domain() -> None:
    with pytest.raises(DomainError):
        LongevityExampleParams.build(p=1.0)
    with pytest.raises(DomainError):
        invest_decision(LongevityExampleParams.model_construct(**{**DEFAULT.model_dump(), "p": 1.0}))


def test_best_estimates_example4a() -> None:
    be, be_star = best_estimates_example4a(100.0, 0.02, 10.0, 0.9, 105.0)
    assert be == pytest.approx(100.0 * math.exp(-0.2))
    assert be_star == pytest.approx(94.5)
    with pytest.raises(DomainError):
        best_estimates_example4a(100.0, 0.02, -1.0, 0.9, 105.0)


def test_simulation_matches_closed_forms() -> None:
    sim = simulate_example4(DEFAULT, 200_000, seed=5)
    r1, r2 = residual_laws(DEFAULT)
    assert sim.ts_actuarial_value.within(ts_actuarial_value(DEFAULT), z=4.0)
    assert sim.ts_financial_value.within(ts_financial_value(DEFAULT), z=4.0)
    assert sim.r1_mean.within(r1.mean, z=4.0)
    assert sim.r2_var.within(r2.var, z=4.0)
    assert sim.var_reduction.within(var_reduction(DEFAULT), z=4.0)


def test_simulation_is_deterministic_across_workers() -> None:
    one = simulate_example4(DEFAULT, 40_000, seed=9, workers=1)
    many = simulate_example4(DEFAULT, 40_000, seed=9, workers=4)
    assert one == many


def test_simulation_needs_two_paths() -> None:
    with pytest.raises(DomainError):
        simulate_example4(DEFAULT, 1, seed=0)
