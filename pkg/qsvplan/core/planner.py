"""One entry point that picks the exact formula or bound for a strategy and scenario."""

import math

from qsvplan.core.general import nonsingular_summary, tests_bounds_nonsingular, tests_upper_bound_general
from qsvplan.core.hedging import hedged_plan
from qsvplan.core.homogeneous import tests_homogeneous
from qsvplan.core.nonadversarial import tests_needed_na
from qsvplan.core.strategy import hedge
from qsvplan.errors import StrategyError
from qsvplan.logger import get_logger
from qsvplan.models import HedgeReport, PlanResult, Precision, Scenario, StrategySummary

logger = get_logger(__name__)

HedgeChoice = str | float | None


def parse_hedge(text: str) -> HedgeChoice:
    """Parse the CLI hedge flag: "none", "auto" or "p=V"."""
    if text == "none":
        return None
    if text == "auto":
        return "auto"
    if text.startswith("p="):
        try:
            return float(text[2:])
        except ValueError as exc:
            raise StrategyError(f"invalid hedging probability in {text!r}") from exc
    raise StrategyError(f"hedge must be none, auto or p=V, got {text!r}")


def _plan_adversarial(summary: StrategySummary, precision: Precision, hedge_report: HedgeReport | None) -> PlanResult:
    common = {"scenario": "adversarial", "precision": precision, "summary": summary, "hedge": hedge_report}
    if summary.homogeneous:
        plan = tests_homogeneous(precision, summary.beta)
        return PlanResult(
            method="adversarial-singular" if summary.beta == 0.0 else "adversarial-exact",
            n_tests=plan.n_exact,
            n_lower=plan.n_lower,
            n_upper=plan.n_upper,
            n_approx=plan.n_approx,
            k_opt=plan.k_opt,
            k_minus=plan.k_minus,
            k_plus=plan.k_plus,
            **common,
        )

    general_upper = tests_upper_bound_general(precision, summary.nu)
    if summary.singular:
        return PlanResult(method="adversarial-general-bound", n_tests=general_upper, n_upper=general_upper, **common)

    bounds = tests_bounds_nonsingular(precision, nonsingular_summary(summary.beta, summary.tau))
    # N < n_upper_strict, so ceil(n_upper_strict) - 1 tests suffice
    n_upper = min(general_upper, max(1, math.ceil(bounds.n_upper_strict) - 1))
    return PlanResult(
        method="adversarial-bound",
        n_tests=n_upper,
        n_lower=min(bounds.n_lower, n_upper),
        n_upper=n_upper,
        n_approx=bounds.n_approx,
        k_minus=bounds.k_minus,
        **common,
    )


def plan(
    summary: StrategySummary,
    precision: Precision,
    scenario: Scenario,
    hedge_choice: HedgeChoice = None,
) -> PlanResult:
    """Test budget for a strategy, optionally hedged with the trivial test.

    Raises:
        StrategyError: if hedging is requested for the nonadversarial scenario
            or the hedging probability is invalid.
    """
    logger.debug("plan(): scenario=%s hedge=%r summary=%r", scenario, hedge_choice, summary)
    if scenario == "nonadversarial":
        if hedge_choice is not None:
            raise StrategyError("hedging only applies to the adversarial scenario")
        na = tests_needed_na(summary.nu, precision)
        return PlanResult(
            scenario="nonadversarial",
            method="nonadversarial-exact",
            n_tests=na.n_exact,
            n_upper=na.n_upper,
            precision=precision,
            summary=summary,
        )

    if hedge_choice is None:
        return _plan_adversarial(summary, precision, None)

    report = hedged_plan(precision, summary.nu, summary.tau, hedge_choice)
    return _plan_adversarial(hedge(summary, report.p), precision, report)
