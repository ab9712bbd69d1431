"""Test counts for a source emitting independent states."""

import math

from qsvplan.core.numerics import ceil_guarded
from qsvplan.logger import get_logger
from qsvplan.models import NaPlan, Precision

logger = get_logger(__name__)


def max_pass_probability(nu: float, epsilon: float) -> float:
    """Largest single-test pass probability of a state with infidelity epsilon: 1 - nu eps."""
    return 1.0 - nu * epsilon


def accept_probability_bound(nu: float, eps_bar: float, n_tests: int) -> float:
    """Upper bound (1 - nu eps_bar)^N on passing N tests at average infidelity eps_bar."""
    return (1.0 - nu * eps_bar) ** n_tests


def _log_pass(nu: float, epsilon: float) -> float:
    return math.log1p(-nu * epsilon)


def _accepts_at_most(n_tests: int, log_pass: float, log_delta: float) -> bool:
    return n_tests * log_pass <= log_delta


def tests_needed_na(nu: float, precision: Precision) -> NaPlan:
    """Minimal N with (1 - nu eps)^N <= delta together with its closed-form upper bound."""
    log_pass = _log_pass(nu, precision.epsilon)
    log_delta = math.log(precision.delta)
    n_exact = ceil_guarded(log_delta / log_pass)

    # the defining inequality, not the ratio, decides
    while n_exact > 0 and _accepts_at_most(n_exact - 1, log_pass, log_delta):
        n_exact -= 1
    while not _accepts_at_most(n_exact, log_pass, log_delta):
        n_exact += 1

    n_upper = ceil_guarded(-log_delta / (nu * precision.epsilon))
    logger.debug(
        "tests_needed_na(): nu=%r eps=%r delta=%r -> n_exact=%d n_upper=%d",
        nu,
        precision.epsilon,
        precision.delta,
        n_exact,
        n_upper,
    )
    return NaPlan(n_exact=n_exact, n_upper=n_upper)
