from typing import Optional

import pandas as pd

from app.commands.formatting import significant, to_csv
from app.models.examples import HybridExampleParams
from app.models.longevity import LongevityExampleParams
from app.models.principle import LinearPrinciple, StdDevPrinciple
from app.models.space import Measure
from app.services import longevity
from app.services.spaces import example5_claim, example5_space
from app.services.valuation import (
    example5_closed_forms,
    two_step_actuarial,
    two_step_difference_example5,
    two_step_financial,
)


def _example4_rows(params: LongevityExampleParams) -> list[tuple[str, str, str]]:
    r1, r2 = longevity.residual_laws(params)
    rows = [
        ("ts_actuarial_value", longevity.ts_actuarial_value(params)),
        ("ts_financial_value", longevity.ts_financial_value(params)),
        ("value_difference", longevity.value_difference(params)),
        ("r1_mean", r1.mean),
        ("r1_var", r1.var),
        ("r2_mean", r2.mean),
        ("r2_var", r2.var),
        ("var_reduction", longevity.var_reduction(params)),
    ]
    table = [("example4", name, significant(x)) for name, x in rows]
    table.append(("example4", "invest", "true" if longevity.invest_decision(params) else "false"))
    return table


def _example5_rows(params: HybridExampleParams) -> list[tuple[str, str, str]]:
    space = example5_space(params)
    claim = example5_claim()
    fin, act = LinearPrinciple(Measure.Q), StdDevPrinciple(params.beta)
    closed_fin, closed_act = example5_closed_forms(params)
    rows = [
        ("ts_financial_value", two_step_financial(fin, act, claim, space)),
        ("ts_actuarial_value", two_step_actuarial(fin, act, claim, space)),
        ("ts_financial_closed_form", closed_fin),
        ("ts_actuarial_closed_form", closed_act),
        (
            "value_difference",
            two_step_difference_example5(
                params.p_I, params.p_Y, params.p_I_given_up, params.p_Y_given_alive, params.beta, params.kappa
            ),
        ),
    ]
    return [("example5", name, significant(x)) for name, x in rows]


def cmd_examples(
    longevity_params: Optional[LongevityExampleParams] = None,
    hybrid_params: Optional[HybridExampleParams] = None,
) -> str:
    rows = _example4_rows(longevity_params or LongevityExampleParams())
    rows += _example5_rows(hybrid_params or HybridExampleParams())
    return to_csv(pd.DataFrame(rows, columns=["example", "quantity", "value"]))
