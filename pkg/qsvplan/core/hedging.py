"""Hedging with the trivial test: cost constants, optimal probabilities and guarantees.

Mixing the trivial test (every state passes) into a strategy with probability p
lifts every non-target eigenvalue x to p + (1 - p) x. A singular or nearly
singular strategy becomes nonsingular, and the adversarial test count then
scales like ln(1/delta) / eps instead of 1 / (eps delta).
"""

import math
from collections.abc import Iterable

from qsvplan.core.homogeneous import tests_homogeneous
from qsvplan.core.nonadversarial import tests_needed_na
from qsvplan.core.numerics import xlogx_inv_near_one
from qsvplan.errors import HedgeRequiredError, StrategyError
from qsvplan.logger import get_logger
from qsvplan.models import HedgeConstants, HedgeReport, Precision

logger = get_logger(__name__)

INV_E = math.exp(-1.0)
BISECTION_TOL = 1e-12
# slack when deciding whether an explicit p lies in [p*(nu, tau), p*(nu)]
P_RANGE_TOL = 1e-10
# tau may exceed 1 - nu by this much when both come from the same beta
BETA_TAU_TOL = 1e-12


def _hedged(p: float, x: float) -> float:
    return p + (1.0 - p) * x


def _snap_tau(nu: float, tau: float) -> tuple[float, bool]:
    """Validate tau <= beta = 1 - nu; returns tau (snapped onto beta when equal up to rounding) and homogeneity."""
    beta = 1.0 - nu
    if tau > beta + BETA_TAU_TOL:
        raise StrategyError(f"tau ({tau!r}) must not exceed beta = 1 - nu ({beta!r})")
    if tau >= beta or math.isclose(tau, beta, rel_tol=1e-12, abs_tol=1e-15):
        return beta, True
    return tau, False


def _cost_terms(p: float, nu: float, tau: float) -> tuple[float, float]:
    """beta_p ln(1/beta_p) and tau_p ln(1/tau_p), computed from the gaps 1 - beta_p and 1 - tau_p."""
    tau, homogeneous = _snap_tau(nu, tau)
    beta_gap = (1.0 - p) * nu
    beta_term = xlogx_inv_near_one(1.0 - beta_gap, beta_gap)
    if homogeneous:
        return beta_term, beta_term
    return beta_term, xlogx_inv_near_one(_hedged(p, tau), (1.0 - p) * (1.0 - tau))


def h_of(p: float, nu: float, tau: float) -> float:
    """h(p, nu, tau) = 1 / min{beta_p ln(1/beta_p), tau_p ln(1/tau_p)}.

    Raises:
        StrategyError: if p is outside [0, 1) or tau exceeds 1 - nu.
        HedgeRequiredError: if tau_p = 0 (p = 0 on a singular strategy).
    """
    if not 0.0 <= p < 1.0:
        raise StrategyError(f"hedging probability must lie in [0, 1), got {p!r}")
    beta_term, tau_term = _cost_terms(p, nu, tau)
    if _hedged(p, tau) == 0.0:
        raise HedgeRequiredError("h is undefined for a singular strategy without hedging (p = 0, tau = 0)")
    return 1.0 / min(beta_term, tau_term)


def _p_star_feasible(p: float, nu: float, tau: float) -> bool:
    beta_term, tau_term = _cost_terms(p, nu, tau)
    return 1.0 - (1.0 - p) * nu >= INV_E and tau_term >= beta_term


def p_star(nu: float, tau: float) -> float:
    """Smallest p with beta_p >= 1/e and tau_p ln(1/tau_p) >= beta_p ln(1/beta_p)."""
    tau, homogeneous = _snap_tau(nu, tau)
    if homogeneous:
        return p_star_homogeneous(nu)
    return p_star_bisect(nu, tau)


def p_star_homogeneous(nu: float) -> float:
    """Closed form (e nu - e + 1) / (e nu) for nu >= 1 - 1/e, else 0."""
    if nu >= 1.0 - INV_E:
        return (math.e * nu - math.e + 1.0) / (math.e * nu)
    return 0.0


def p_star_bisect(nu: float, tau: float) -> float:
    """p*(nu, tau) by bisection on the feasibility indicator."""
    tau, _ = _snap_tau(nu, tau)
    if _p_star_feasible(0.0, nu, tau):
        return 0.0
    # at tau_p = 1/e both conditions hold, so this is feasible
    hi = max(0.0, (INV_E - tau) / (1.0 - tau))
    lo = 0.0
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if _p_star_feasible(mid, nu, tau):
            hi = mid
        else:
            lo = mid
    return hi


def _ln_inv_fidelity_delta(precision: Precision) -> float:
    return -math.log(precision.fidelity * precision.delta)


def _ratio_factor(precision: Precision, nu: float) -> float:
    """[ln(1/(1 - nu eps))] ln(F delta) / (nu eps ln delta)."""
    epsilon = precision.epsilon
    return (-math.log1p(-nu * epsilon)) * math.log(precision.fidelity * precision.delta) / (
        nu * epsilon * math.log(precision.delta)
    )


def overhead_ratio_bound(precision: Precision, nu: float, tau: float, p: float) -> float:
    """Upper bound on N(eps, delta, Omega_p) / N_na(eps, delta, Omega)."""
    return nu * h_of(p, nu, tau) * _ratio_factor(precision, nu)


def nu_over_e_bound_applies(nu: float, tau: float, p: float) -> bool:
    """True when p = nu/e or p*(nu, tau) <= p <= p*(nu)."""
    if math.isclose(p, nu / math.e, rel_tol=1e-12, abs_tol=1e-15):
        return True
    return p_star(nu, tau) - P_RANGE_TOL <= p <= p_star(nu, 0.0) + P_RANGE_TOL


def hedge_constants(nu: float, tau: float) -> HedgeConstants:
    """p*(nu, tau), p*(nu), nu/e and the cost constant h at each."""
    star = p_star(nu, tau)
    h_star = h_of(nu / math.e, nu, 0.0)
    return HedgeConstants(
        nu=nu,
        tau=tau,
        p_star=star,
        p_star_max=p_star(nu, 0.0),
        p_nu_over_e=nu / math.e,
        h_at_p_star=h_of(star, nu, tau),
        h_at_nu_over_e=h_of(nu / math.e, nu, tau),
        h_star=h_star,
        nu_h=nu * h_star,
    )


def hedged_plan(precision: Precision, nu: float, tau: float, p_choice: float | str = "auto") -> HedgeReport:
    """Hedge a strategy with spectral gap nu and smallest eigenvalue tau.

    Outside the range where the nu/e constant is proven, the report falls
    back to h(p, nu, tau) and sets ``guaranteed`` to False.

    Args:
        precision: Target infidelity eps and significance delta.
        nu: Spectral gap 1 - beta of the unhedged strategy, in (0, 1].
        tau: Smallest eigenvalue, at most 1 - nu (equality up to rounding is
            read as a homogeneous strategy).
        p_choice: ``"auto"`` for p = nu/e, which needs no knowledge of tau,
            or an explicit probability in [0, 1).

    Returns:
        HedgeReport with the hedged eigenvalues, h, both optimal
        probabilities and the test-count bounds.

    Raises:
        StrategyError: on an unknown choice, p outside [0, 1) or tau > 1 - nu.
        HedgeRequiredError: for p = 0 on a singular strategy.
    """
    if p_choice == "auto":
        p = nu / math.e
    elif isinstance(p_choice, str):
        raise StrategyError(f"unknown hedging choice {p_choice!r}")
    else:
        p = float(p_choice)

    h_value = h_of(p, nu, tau)
    h_star = h_of(nu / math.e, nu, 0.0)
    guaranteed = nu_over_e_bound_applies(nu, tau, p)
    h_bound = h_star if guaranteed else h_value
    log_term = _ln_inv_fidelity_delta(precision)

    report = HedgeReport(
        p=p,
        beta_p=_hedged(p, 1.0 - nu),
        tau_p=_hedged(p, tau),
        h_value=h_value,
        p_star=p_star(nu, tau),
        p_star_max=p_star(nu, 0.0),
        nu_h=nu * h_star,
        n_bound=h_bound * log_term / precision.epsilon,
        n_bound_secondary=log_term / ((1.0 - nu + INV_E * nu * nu) * nu * precision.epsilon),
        ratio_bound=nu * h_bound * _ratio_factor(precision, nu),
        guaranteed=guaranteed,
    )
    logger.debug(
        "hedged_plan(): nu=%r tau=%r p=%r guaranteed=%s n_bound=%r",
        nu,
        tau,
        p,
        guaranteed,
        report.n_bound,
    )
    return report


def hedged_tests_exact_sweep(precision: Precision, lam: float, ps: Iterable[float]) -> list[dict[str, float | int]]:
    """Exact hedged test count of a homogeneous strategy for each p."""
    nu = 1.0 - lam
    n_na = tests_needed_na(nu, precision).n_exact
    rows: list[dict[str, float | int]] = []
    for p in ps:
        lam_p = _hedged(p, lam)
        plan = tests_homogeneous(precision, lam_p)
        rows.append(
            {
                "lambda": lam,
                "epsilon": precision.epsilon,
                "delta": precision.delta,
                "p": p,
                "lambda_p": lam_p,
                "n_exact": plan.n_exact,
                "n_na": n_na,
                "ratio": plan.n_exact / n_na,
            }
        )
    return rows
