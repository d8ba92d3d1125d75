"""Property suites run by the `verify` command.

Each suite draws its randomness from a generator seeded by (seed, suite index)
and returns the first counterexample it finds, or None.
"""

import logging
import math
import time
from typing import Callable, Optional

import numpy as np
from scipy.special import ndtri

from app.core.config import settings
from app.core.errors import DomainError
from app.models.examples import ComonotonicParams, HybridExampleParams
from app.models.hedging import CompositeHedger, QuadraticHedger, RiskFreeFullValueHedger, TradedAssets
from app.models.longevity import LongevityExampleParams
from app.models.principle import (
    CoherentPrinciple,
    LinearPrinciple,
    StdDevPrinciple,
    TVaRPrinciple,
    ValuationPrinciple,
    describe,
)
from app.models.space import Claim, Coordinate, Density, FiniteSpace, Measure
from app.models.verification import Counterexample, SuiteResult, VerifyReport
from app.services import longevity
from app.services.consistency import (
    find_orthogonal_violation,
    find_strong_consistency_violation,
    find_weak_consistency_violation,
)
from app.services.finite_space import (
    conditional_expectation,
    expectation,
    is_measurable,
    partition_by_coordinate,
)
from app.services.hedging import find_hedger_violation, hedge, hedge_based_value, strategy_cost
from app.services.spaces import (
    comonotonic_space,
    example5_claim,
    example5_space,
    measurable_claims,
    random_claims,
    random_density,
    random_product_space,
    random_space,
)
from app.services.valuation import (
    example5_closed_forms,
    lemma33_decompose,
    product_formula_check,
    two_step_actuarial,
    two_step_difference_example5,
    two_step_financial,
    value,
)

logger = logging.getLogger(__name__)

TOL = 1e-8
CLAIMS_PER_SPACE = 6
EXAMPLE5_DRAWS = 100
EXAMPLE4_IDENTITY_DRAWS = 10_000
EXAMPLE4_MC_SETS = 50
EXAMPLE4_MC_PATHS = 1_000_000
Z_THRESHOLD = 3.0

Suite = Callable[[np.random.Generator, int], Optional[Counterexample]]


def _seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**31))


def sample_financial_principle(rng: np.random.Generator, space: FiniteSpace) -> ValuationPrinciple:
    if rng.random() < 0.5:
        return LinearPrinciple(Measure.Q)
    members = [Density.from_measure(space.q, space)]
    members += [random_density(space, rng) for _ in range(int(rng.integers(1, 4)))]
    return CoherentPrinciple(tuple(members))


def sample_actuarial_principle(rng: np.random.Generator, space: FiniteSpace) -> ValuationPrinciple:
    kind = int(rng.integers(0, 5))
    if kind == 0:
        return StdDevPrinciple(float(rng.uniform(0.0, 2.0)))
    if kind == 1:
        return LinearPrinciple(Measure.P)
    if kind == 2:
        return LinearPrinciple(density=random_density(space, rng))
    if kind == 3:
        return CoherentPrinciple(tuple(random_density(space, rng) for _ in range(int(rng.integers(1, 4)))))
    return TVaRPrinciple(float(rng.uniform(0.5, 0.99)))


def _market(space: FiniteSpace) -> TradedAssets:
    """Bank account plus the financial coordinate when it takes at least two values."""
    if np.unique(space.financial).size < 2:
        return TradedAssets.risk_free_only(space.size)
    return TradedAssets((Claim.constant(1.0, space.size), Claim(space.financial)))


def _violation(name: str, space: FiniteSpace, claim: Claim, expected: float, actual: float, **extra) -> Counterexample:
    return Counterexample(
        name=name,
        space=space.to_dict(),
        claim=claim.values.tolist(),
        expected=expected,
        actual=actual,
        **extra,
    )


def suite_finite_space(rng: np.random.Generator, trials: int) -> Optional[Counterexample]:
    """Tower property, idempotence, measurable fixed point and linearity of conditioning."""
    for _ in range(trials):
        space = random_space(rng)
        if not space.equivalent_measures():
            return Counterexample(
                name="equivalent_measures", space=space.to_dict(), detail="p and q charge different outcomes"
            )
        a, b = (float(x) for x in rng.normal(size=2))
        for measure in Measure:
            for coord in Coordinate:
                partition = partition_by_coordinate(space, coord)
                first, second = random_claims(space, 2, rng)
                cond = conditional_expectation(first, partition, measure, space)
                if abs(expectation(cond, measure, space) - expectation(first, measure, space)) > 1e-10:
                    return _violation(
                        "tower_property", space, first,
                        expectation(first, measure, space), expectation(cond, measure, space),
                    )
                again = conditional_expectation(cond, partition, measure, space)
                if not again.allclose(cond, 1e-12 * max(1.0, float(np.abs(cond.values).max()))):
                    return _violation("idempotence", space, first, 0.0, float(np.abs(again.values - cond.values).max()))
                if not is_measurable(cond, partition):
                    return _violation("measurability", space, first, 0.0, float(np.ptp(cond.values)))
                combined = conditional_expectation(a * first + b * second, partition, measure, space)
                split = a * cond + b * conditional_expectation(second, partition, measure, space)
                if not combined.allclose(split, 1e-10 * max(1.0, float(np.abs(split.values).max()))):
                    return _violation("linearity", space, first, 0.0, float(np.abs(combined.values - split.values).max()))
    return None


def suite_principle_axioms(rng: np.random.Generator, trials: int) -> Optional[Counterexample]:
    """Normalization and translation invariance of every principle, non-negative
    loadings of std_dev and tvar, and the coherent worst case."""
    for _ in range(trials):
        space = random_space(rng)
        principles = [sample_financial_principle(rng, space), sample_actuarial_principle(rng, space)]
        zero = Claim.constant(0.0, space.size)
        for principle in principles:
            label = {"principle": describe(principle)}
            if abs(value(principle, zero, space)) > 1e-10:
                return _violation("normalization", space, zero, 0.0, value(principle, zero, space), parameters=label)
            for claim in random_claims(space, 2, rng):
                shift = float(rng.normal(scale=50.0))
                base = value(principle, claim, space)
                shifted = value(principle, claim + shift, space)
                if abs(shifted - base - shift) > 1e-10 * max(1.0, abs(base) + abs(shift)):
                    return _violation("translation_invariance", space, claim, base + shift, shifted, parameters=label)
                if isinstance(principle, (StdDevPrinciple, TVaRPrinciple)):
                    mean = expectation(claim, Measure.P, space)
                    if base < mean - 1e-10 * max(1.0, abs(mean)):
                        return _violation("non_negative_loading", space, claim, mean, base, parameters=label)
                if isinstance(principle, CoherentPrinciple):
                    members = [float(np.dot(space.p * d.values, claim.values)) for d in principle.densities]
                    if abs(base - max(members)) > 1e-10 * max(1.0, abs(base)):
                        return _violation("coherent_worst_case", space, claim, max(members), base, parameters=label)
    return None


def suite_two_step_actuarial(rng: np.random.Generator, trials: int) -> Optional[Counterexample]:
    """Two-step actuarial valuations are weak actuarial-consistent."""
    for _ in range(trials):
        space = random_space(rng)
        fin = sample_financial_principle(rng, space)
        act = sample_actuarial_principle(rng, space)
        found = find_weak_consistency_violation(
            lambda s: two_step_actuarial(fin, act, s, space),
            act, space, Coordinate.ACTUARIAL, CLAIMS_PER_SPACE, TOL, _seed(rng),
        )
        if found is not None:
            return found.model_copy(update={"parameters": {"fin": describe(fin), "act": describe(act)}})
    return None


def suite_two_step_financial(rng: np.random.Generator, trials: int) -> Optional[Counterexample]:
    """Two-step financial valuations are weak market-consistent."""
    for _ in range(trials):
        space = random_space(rng)
        fin = sample_financial_principle(rng, space)
        act = sample_actuarial_principle(rng, space)
        found = find_weak_consistency_violation(
            lambda s: two_step_financial(fin, act, s, space),
            fin, space, Coordinate.FINANCIAL, CLAIMS_PER_SPACE, TOL, _seed(rng),
        )
        if found is not None:
            return found.model_copy(update={"parameters": {"fin": describe(fin), "act": describe(act)}})
    return None


def suite_hedge_round_trip(rng: np.random.Generator, trials: int) -> Optional[Counterexample]:
    """A weak actuarial-consistent valuation is the hedge-based valuation of the
    hedger that banks its value, and the cost of that hedger is again weak
    actuarial-consistent."""
    for _ in range(trials):
        space = random_space(rng)
        fin = sample_financial_principle(rng, space)
        act = sample_actuarial_principle(rng, space)
        assets = _market(space)
        hedger = RiskFreeFullValueHedger(fin, act)

        def valuation(s: Claim) -> float:
            return two_step_actuarial(fin, act, s, space)

        found = find_hedger_violation(hedger, act, space, assets, CLAIMS_PER_SPACE, TOL, _seed(rng))
        if found is not None:
            return found
        for claim in random_claims(space, CLAIMS_PER_SPACE, rng):
            expected = valuation(claim)
            rebuilt = hedge_based_value(hedger, fin, act, claim, assets, space, residual=valuation)
            if abs(rebuilt - expected) > TOL:
                return _violation("hedge_based_round_trip", space, claim, expected, rebuilt)

        def hedge_cost(s: Claim) -> float:
            return strategy_cost(hedge(hedger, s, assets, space), assets, fin, space)

        found = find_weak_consistency_violation(
            hedge_cost, act, space, Coordinate.ACTUARIAL, CLAIMS_PER_SPACE, TOL, _seed(rng)
        )
        if found is not None:
            return found.model_copy(update={"name": "hedger_cost_consistency"})
    return None


def suite_weak_implies_strong(rng: np.random.Generator, trials: int) -> Optional[Counterexample]:
    """With a linear actuarial principle, weak actuarial consistency of a coherent
    two-step valuation upgrades to strong consistency."""
    for _ in range(trials):
        space = random_space(rng)
        fin = CoherentPrinciple(tuple(random_density(space, rng) for _ in range(int(rng.integers(1, 4)))))
        act = LinearPrinciple(density=random_density(space, rng))

        def valuation(s: Claim) -> float:
            return two_step_actuarial(fin, act, s, space)

        seed = _seed(rng)
        weak = find_weak_consistency_violation(
            valuation, act, space, Coordinate.ACTUARIAL, CLAIMS_PER_SPACE, TOL, seed
        )
        if weak is not None:
            return weak
        strong = find_strong_consistency_violation(
            valuation, act, space, Coordinate.ACTUARIAL, CLAIMS_PER_SPACE, TOL, seed
        )
        if strong is not None:
            return strong
    return None


def suite_decomposition(rng: np.random.Generator, trials: int) -> Optional[Counterexample]:
    """S = H1 + H2 with H2 actuarial, and the composite hedger is actuarial-consistent."""
    for _ in range(trials):
        space = random_space(rng)
        act = sample_actuarial_principle(rng, space)
        partition = partition_by_coordinate(space, Coordinate.ACTUARIAL)
        for claim in random_claims(space, 2, rng):
            h2, h1 = lemma33_decompose(claim, act, space)
            if not is_measurable(h2, partition, 1e-10):
                return _violation("decomposition_measurable", space, claim, 0.0, float(np.ptp(h2.values)))
            if not (h1 + h2).allclose(claim, 1e-10):
                return _violation("decomposition_sum", space, claim, 0.0, float(np.abs((h1 + h2 - claim).values).max()))
        hedger = CompositeHedger(QuadraticHedger(), act)
        found = find_hedger_violation(hedger, act, space, _market(space), CLAIMS_PER_SPACE, TOL, _seed(rng))
        if found is not None:
            return found.model_copy(update={"parameters": {"act": describe(act)}})
    return None


def suite_quadratic_orthogonality(rng: np.random.Generator, trials: int) -> Optional[Counterexample]:
    """Quadratic hedge residuals are p-orthogonal to every traded payoff."""
    for _ in range(trials):
        space = random_space(rng)
        assets = _market(space)
        payoffs = assets.payoff_matrix()
        for claim in random_claims(space, 2, rng):
            strategy = hedge(QuadraticHedger(), claim, assets, space)
            residual = claim.values - payoffs @ strategy.units
            for j in range(assets.count):
                inner = float(np.dot(space.p, residual * payoffs[:, j]))
                scale = math.sqrt(float(np.dot(space.p, claim.values**2)) * float(np.dot(space.p, payoffs[:, j] ** 2)))
                if abs(inner) > TOL * max(1.0, scale):
                    return _violation("quadratic_orthogonality", space, claim, 0.0, inner, detail=f"asset {j}")
    return None


def suite_product_formula(rng: np.random.Generator, trials: int) -> Optional[Counterexample]:
    """Independent product spaces: fair valuation of products of pure claims, and
    orthogonal consistency of the two-step actuarial valuation."""
    fin = LinearPrinciple(Measure.Q)
    for _ in range(trials):
        space = random_product_space(rng)
        act = sample_actuarial_principle(rng, space)
        fin_part = partition_by_coordinate(space, Coordinate.FINANCIAL)
        act_part = partition_by_coordinate(space, Coordinate.ACTUARIAL)
        s1 = Claim(fin_part.lift(rng.uniform(0.0, 100.0, len(fin_part.cells))))
        s2 = Claim(act_part.lift(rng.uniform(0.0, 100.0, len(act_part.cells))))
        expected = value(fin, s1, space) * value(act, s2, space)
        if not product_formula_check(fin, act, s1, s2, space, 1e-10 * max(1.0, abs(expected))):
            return Counterexample(
                name="product_formula",
                space=space.to_dict(),
                claim=s1.values.tolist(),
                other_claim=s2.values.tolist(),
                expected=expected,
                actual=two_step_actuarial(fin, act, s1 * s2, space),
                parameters={"act": describe(act)},
            )
        found = find_orthogonal_violation(
            lambda s: two_step_actuarial(fin, act, s, space), fin, act, space, CLAIMS_PER_SPACE, TOL, _seed(rng)
        )
        if found is not None:
            return found
    return None


def suite_comonotonic(rng: np.random.Generator, trials: int) -> Optional[Counterexample]:
    """The same payoff read as a financial claim and as an actuarial claim gets
    100q and 100(p + beta sd), so no valuation is fair for that pair of principles."""
    for _ in range(trials):
        params = ComonotonicParams(
            p=float(rng.uniform(0.05, 0.95)), q=float(rng.uniform(0.05, 0.95)), beta=float(rng.uniform(0.0, 2.0))
        )
        space = comonotonic_space(params)
        claim = Claim([0.0, 100.0])
        fin, act = LinearPrinciple(Measure.Q), StdDevPrinciple(params.beta)
        financial = two_step_financial(fin, act, claim, space)
        actuarial = value(act, claim, space)
        expected_fin = 100.0 * params.q
        expected_act = 100.0 * (params.p + params.beta * math.sqrt(params.p * (1.0 - params.p)))
        extra = {"parameters": params.model_dump()}
        if abs(financial - expected_fin) > 1e-10:
            return _violation("comonotonic_financial", space, claim, expected_fin, financial, **extra)
        if abs(actuarial - expected_act) > 1e-10:
            return _violation("comonotonic_actuarial", space, claim, expected_act, actuarial, **extra)
        if abs(expected_fin - expected_act) > 1e-9 and abs(financial - actuarial) <= 1e-10:
            return _violation("comonotonic_no_fair_valuation", space, claim, expected_act, financial, **extra)
    return None


def random_hybrid_params(rng: np.random.Generator) -> HybridExampleParams:
    while True:
        p_I = float(rng.uniform(0.05, 0.95))
        p_Y = float(rng.uniform(0.05, 0.95))
        low = max(0.0, (p_Y + p_I - 1.0) / p_Y)
        high = min(1.0, p_I / p_Y)
        p_up = float(rng.uniform(low, high))
        try:
            draft = HybridExampleParams.build(p_I=p_I, p_Y=p_Y, p_I_given_up=p_up, beta=0.0, kappa=0.0)
            conditionals = (draft.p_Y, draft.p_Y_given_alive, draft.p_Y_given_dead)
            kappa = float(rng.uniform(-min(conditionals), 1.0 - max(conditionals))) * 0.9
            return HybridExampleParams.build(
                p_I=p_I, p_Y=p_Y, p_I_given_up=p_up, beta=float(rng.uniform(0.0, 2.0)), kappa=kappa
            )
        except DomainError:
            continue


def suite_example5(rng: np.random.Generator, trials: int) -> Optional[Counterexample]:
    """Two-step values on the explicit (Y, I) table agree with their closed forms."""
    for _ in range(EXAMPLE5_DRAWS):
        params = random_hybrid_params(rng)
        space = example5_space(params)
        claim = example5_claim()
        fin, act = LinearPrinciple(Measure.Q), StdDevPrinciple(params.beta)
        on_space = (two_step_financial(fin, act, claim, space), two_step_actuarial(fin, act, claim, space))
        closed = example5_closed_forms(params)
        extra = {"parameters": params.model_dump()}
        for name, computed, formula in zip(("financial", "actuarial"), on_space, closed):
            if abs(computed - formula) > 1e-12 * max(1.0, abs(formula)):
                return _violation(f"example5_{name}", space, claim, formula, computed, **extra)
        difference = two_step_difference_example5(
            params.p_I, params.p_Y, params.p_I_given_up, params.p_Y_given_alive, params.beta, params.kappa
        )
        if abs(difference - (closed[1] - closed[0])) > 1e-12 * max(1.0, abs(closed[0]), abs(closed[1])):
            return _violation("example5_difference", space, claim, closed[1] - closed[0], difference, **extra)
    return None


def random_longevity_params(rng: np.random.Generator) -> LongevityExampleParams:
    return LongevityExampleParams(
        mu1=float(rng.uniform(50.0, 150.0)),
        mu2=float(rng.uniform(50.0, 150.0)),
        sigma1=float(rng.uniform(1.0, 20.0)),
        sigma2=float(rng.uniform(1.0, 20.0)),
        rho=float(rng.uniform(-1.0, 1.0)),
        beta=float(rng.uniform(0.0, 2.0)),
        kappa=float(rng.uniform(0.0, 1.0)),
        p=float(rng.uniform(0.9, 0.999)),
    )


def suite_example4_identities(rng: np.random.Generator, trials: int) -> Optional[Counterexample]:
    """Difference identity, VaR identity and monotonicity in kappa of the Gaussian example."""
    for _ in range(EXAMPLE4_IDENTITY_DRAWS):
        params = random_longevity_params(rng)
        extra = {"parameters": params.model_dump()}
        direct = longevity.ts_financial_value(params) - longevity.ts_actuarial_value(params)
        if abs(longevity.value_difference(params) - direct) > 1e-12 * max(1.0, abs(params.mu1)):
            return Counterexample(name="example4_difference", expected=direct, actual=longevity.value_difference(params), **extra)
        s = math.sqrt(max(0.0, 1.0 - params.rho**2))
        rhs = params.sigma1 * (float(ndtri(params.p)) - params.beta) * (s - 1.0)
        if abs(longevity.var_reduction(params) - rhs) > 1e-9 * max(1.0, abs(rhs)):
            return Counterexample(name="example4_var_identity", expected=rhs, actual=longevity.var_reduction(params), **extra)
        if longevity.invest_decision(params) != (longevity.value_difference(params) < longevity.var_reduction(params)):
            return Counterexample(name="example4_decision", detail="decision disagrees with VaR comparison", **extra)
    for _ in range(max(1, trials // 10)):
        params = random_longevity_params(rng)
        rho = abs(params.rho)
        gaps = [
            abs(longevity.value_difference(params.model_copy(update={"rho": rho, "kappa": kappa})))
            for kappa in np.linspace(0.0, 2.0, 21)
        ]
        if any(later < earlier - 1e-12 for earlier, later in zip(gaps, gaps[1:])):
            return Counterexample(name="example4_kappa_monotonicity", detail=f"gaps {gaps}", parameters=params.model_dump())
    return None


def _within(name: str, estimate, target: float, slack: float, parameters: dict) -> Optional[Counterexample]:
    if abs(estimate.estimate - target) > Z_THRESHOLD * estimate.standard_error + slack:
        return Counterexample(
            name=name,
            expected=target,
            actual=estimate.estimate,
            detail=f"standard error {estimate.standard_error:.3g}",
            parameters=parameters,
        )
    return None


def suite_example4_monte_carlo(rng: np.random.Generator, trials: int) -> Optional[Counterexample]:
    """Closed forms of the Gaussian example against simulation."""
    for _ in range(EXAMPLE4_MC_SETS):
        params = random_longevity_params(rng)
        sim = longevity.simulate_example4(params, EXAMPLE4_MC_PATHS, _seed(rng))
        r1, r2 = longevity.residual_laws(params)
        slack = 1e-9 * params.sigma1**2
        checks = (
            ("example4_mc_ts_actuarial", sim.ts_actuarial_value, longevity.ts_actuarial_value(params)),
            ("example4_mc_ts_financial", sim.ts_financial_value, longevity.ts_financial_value(params)),
            ("example4_mc_r1_mean", sim.r1_mean, r1.mean),
            ("example4_mc_r1_var", sim.r1_var, r1.var),
            ("example4_mc_r2_mean", sim.r2_mean, r2.mean),
            ("example4_mc_r2_var", sim.r2_var, r2.var),
            ("example4_mc_var_reduction", sim.var_reduction, longevity.var_reduction(params)),
        )
        for name, estimate, target in checks:
            found = _within(name, estimate, target, slack, params.model_dump())
            if found is not None:
                return found
    return None


SUITES: tuple[tuple[str, Suite], ...] = (
    ("finite_space", suite_finite_space),
    ("principle_axioms", suite_principle_axioms),
    ("two_step_actuarial_weak_consistency", suite_two_step_actuarial),
    ("two_step_financial_weak_consistency", suite_two_step_financial),
    ("hedge_based_round_trip", suite_hedge_round_trip),
    ("weak_implies_strong_consistency", suite_weak_implies_strong),
    ("actuarial_decomposition", suite_decomposition),
    ("quadratic_orthogonality", suite_quadratic_orthogonality),
    ("product_formula", suite_product_formula),
    ("comonotonic_no_fair_valuation", suite_comonotonic),
    ("example5_closed_forms", suite_example5),
    ("example4_identities", suite_example4_identities),
    ("example4_monte_carlo", suite_example4_monte_carlo),
)

_FIXED_TRIALS = {
    "example5_closed_forms": EXAMPLE5_DRAWS,
    "example4_identities": EXAMPLE4_IDENTITY_DRAWS,
    "example4_monte_carlo": EXAMPLE4_MC_SETS,
}


def run_suites(seed: int, trials: Optional[int] = None, only: Optional[set[str]] = None) -> VerifyReport:
    trials = trials if trials is not None else settings.verify_trials
    results = []
    for index, (name, suite) in enumerate(SUITES):
        if only is not None and name not in only:
            continue
        started = time.perf_counter()
        rng = np.random.default_rng([seed, index])
        counterexample = suite(rng, trials)
        elapsed = time.perf_counter() - started
        if counterexample is None:
            logger.debug("suite %s passed in %.2fs", name, elapsed)
        else:
            logger.warning("suite %s failed: %s", name, counterexample.to_json())
        results.append(
            SuiteResult(name=name, trials=_FIXED_TRIALS.get(name, trials), counterexample=counterexample)
        )
    return VerifyReport(seed=seed, suites=results)
