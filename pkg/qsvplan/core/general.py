"""Fidelity and test-count bounds for arbitrary verification operators."""

import math

from qsvplan.core.homogeneous import fidelity_homogeneous
from qsvplan.core.numerics import ceil_guarded, floor_guarded, xlogx_inv
from qsvplan.core.strategy import summarize
from qsvplan.errors import HedgeRequiredError, StrategyError
from qsvplan.logger import get_logger
from qsvplan.models import (
    EigenSpectrum,
    FidelityReport,
    GeneralFidelityBound,
    NonsingularPlan,
    NonsingularSummary,
    Precision,
)

logger = get_logger(__name__)


def fidelity_lower_bound_general(n_tests: int, delta: float, nu: float) -> GeneralFidelityBound:
    """1 - (1 - delta) / (N nu delta), exact for delta >= (1 + N beta) / (N + 1)."""
    beta = 1.0 - nu
    bound = 1.0 - (1.0 - delta) / (n_tests * nu * delta)
    saturated = delta >= (1.0 + n_tests * beta) / (n_tests + 1)
    return GeneralFidelityBound(bound=bound, saturated=saturated)


def tests_upper_bound_general(precision: Precision, nu: float) -> int:
    """ceil((1 - delta) / (nu delta eps)); enough tests for any strategy with gap nu."""
    delta = precision.delta
    return max(1, ceil_guarded((1.0 - delta) / (nu * delta * precision.epsilon)))


def nonsingular_summary(beta: float, tau: float) -> NonsingularSummary:
    """Select beta_tilde and the cost constant h of a nonsingular strategy.

    Raises:
        HedgeRequiredError: if tau = 0.
        StrategyError: if tau > beta or beta is outside (0, 1).
    """
    if tau == 0.0:
        raise HedgeRequiredError("tau = 0: the operator is singular; hedge it with the trivial test first")
    if tau > beta:
        raise StrategyError(f"tau ({tau!r}) must not exceed beta ({beta!r})")
    if not 0.0 < beta < 1.0:
        raise StrategyError(f"beta must lie in (0, 1), got {beta!r}")
    beta_tilde = beta if xlogx_inv(beta) <= xlogx_inv(tau) else tau
    return NonsingularSummary(beta=beta, tau=tau, beta_tilde=beta_tilde, h=1.0 / xlogx_inv(beta_tilde))


def fidelity_lower_bound_nonsingular(n_tests: int, delta: float, summary: NonsingularSummary) -> float:
    """A / (A - h ln(tau delta)) with A = N + 1 - ln(tau delta) / ln(beta)."""
    log_tau_delta = math.log(summary.tau * delta)
    a = n_tests + 1 - log_tau_delta / math.log(summary.beta)
    return a / (a - summary.h * log_tau_delta)


def tests_bounds_nonsingular(precision: Precision, summary: NonsingularSummary) -> NonsingularPlan:
    """Lower bound, strict upper bound and approximation of N(eps, delta, Omega)."""
    epsilon, delta = precision.epsilon, precision.delta
    fidelity = precision.fidelity
    beta_tilde = summary.beta_tilde
    k_minus = floor_guarded(math.log(delta) / math.log(beta_tilde))
    n_lower = k_minus + ceil_guarded(k_minus * fidelity / (beta_tilde * epsilon))
    n_upper_strict = summary.h * -math.log(fidelity * delta) / epsilon
    n_approx = summary.h * -math.log(delta) / epsilon
    return NonsingularPlan(
        k_minus=k_minus,
        n_lower=n_lower,
        n_upper_strict=n_upper_strict,
        n_approx=n_approx,
    )


def fidelity_report(spectrum: EigenSpectrum, n_tests: int, delta: float) -> FidelityReport:
    """Exact homogeneous fidelity (when available) alongside both general bounds."""
    summary = summarize(spectrum)
    exact = fidelity_homogeneous(n_tests, delta, summary.beta) if summary.homogeneous else None
    nonsingular = None
    if not summary.singular:
        nonsingular = fidelity_lower_bound_nonsingular(
            n_tests, delta, nonsingular_summary(summary.beta, summary.tau)
        )
    logger.debug("fidelity_report(): N=%d delta=%r homogeneous=%s", n_tests, delta, summary.homogeneous)
    return FidelityReport(
        n_tests=n_tests,
        delta=delta,
        exact=exact,
        general_bound=fidelity_lower_bound_general(n_tests, delta, summary.nu),
        nonsingular_bound=nonsingular,
    )
