"""Exact adversarial fidelity and test counts for homogeneous strategies.

A homogeneous strategy has every non-target eigenvalue equal to lambda. The
singular case lambda = 0 (the target projector) has its own closed forms;
for 0 < lambda < 1 the minimum conditional fidelity is attained by mixing two
neighbouring "k copies off target" configurations, and the integer k is
located from log-derived candidates and then settled against the defining
inequality.
"""

import math
from collections.abc import Callable

from qsvplan.core.numerics import ceil_guarded, floor_guarded, power
from qsvplan.logger import get_logger
from qsvplan.models import FidelityResult, HomogeneousPlan, Precision

logger = get_logger(__name__)

# integer searches start this far above the closed-form candidate
SCAN_WINDOW = 2
# relative rounding slack of n_tilde, in units of its uncancelled magnitude
TILDE_REL_TOL = 4e-15
# never more than half a test
TILDE_MAX_SLACK = 0.5


def _largest_k(satisfies: Callable[[int], bool], start: int, upper: int | None = None) -> int:
    """Largest k >= 0 with satisfies(k), for a predicate true at 0 and monotone decreasing."""
    k = max(0, start if upper is None else min(start, upper))
    while k > 0 and not satisfies(k):
        k -= 1
    while (upper is None or k < upper) and satisfies(k + 1):
        k += 1
    return k


def fidelity_singular(n_tests: int, delta: float) -> float:
    """F(N, delta, lambda = 0) = max{0, ((N + 1) delta - 1) / (N delta)}."""
    return max(0.0, ((n_tests + 1) * delta - 1.0) / (n_tests * delta))


def tests_singular(precision: Precision) -> int:
    """N(eps, delta, lambda = 0) = ceil((1 - delta) / (eps delta))."""
    delta = precision.delta
    return max(1, ceil_guarded((1.0 - delta) / (precision.epsilon * delta)))


def zeta(n_tests: int, delta: float, lam: float, k: int) -> float:
    """lambda {delta [1 + (N - k) nu] - lambda^k} / (nu (k nu + N lambda))."""
    nu = 1.0 - lam
    numerator = lam * (delta * (1.0 + (n_tests - k) * nu) - power(lam, k))
    return numerator / (nu * (k * nu + n_tests * lam))


def _pass_weight(n_tests: int, lam: float, k: int) -> float:
    """(N + 1 - k) lambda^k + k lambda^(k-1), i.e. (N + 1) times the pass probability with k copies off target."""
    if k == 0:
        return n_tests + 1.0
    return power(lam, k - 1) * ((n_tests + 1) * lam + k * (1.0 - lam))


def _k_star(n_tests: int, delta: float, lam: float) -> int:
    threshold = (n_tests + 1) * delta
    k_plus = ceil_guarded(math.log(delta) / math.log(lam))
    return _largest_k(
        lambda k: _pass_weight(n_tests, lam, k) >= threshold,
        start=k_plus + SCAN_WINDOW,
        upper=n_tests + 1,
    )


def fidelity_homogeneous(n_tests: int, delta: float, lam: float) -> FidelityResult:
    """Minimum conditional fidelity F(N, delta, lambda) after N passed tests."""
    if lam == 0.0:
        k_star = 1 if (n_tests + 1) * delta <= 1.0 else 0
        return FidelityResult(fidelity=fidelity_singular(n_tests, delta), k_star=k_star, zero_regime=False)

    if delta <= power(lam, n_tests):
        return FidelityResult(fidelity=0.0, k_star=None, zero_regime=True)

    k_star = _k_star(n_tests, delta, lam)
    fidelity = zeta(n_tests, delta, lam, k_star) / delta
    return FidelityResult(fidelity=min(1.0, max(0.0, fidelity)), k_star=k_star, zero_regime=False)


def _n_tilde_terms(epsilon: float, delta: float, lam: float, k: int) -> tuple[tuple[float, float, float], float]:
    nu = 1.0 - lam
    terms = (k * nu * nu * delta * (1.0 - epsilon), power(lam, k + 1), lam * delta * (k * nu - 1.0))
    return terms, lam * nu * delta * epsilon


def n_tilde(epsilon: float, delta: float, lam: float, k: int) -> float:
    """Real-valued test count of the k-th candidate adversary."""
    terms, scale = _n_tilde_terms(epsilon, delta, lam, k)
    return math.fsum(terms) / scale


def tests_homogeneous_approx(precision: Precision, lam: float) -> float:
    """High-precision approximation ln(1/delta) / (lambda eps ln(1/lambda))."""
    return math.log(precision.delta) / (lam * precision.epsilon * math.log(lam))


def _suffices(n_tests: int, epsilon: float, delta: float, lam: float) -> bool:
    """F(N, delta, lambda) >= 1 - eps, decided as N >= n_tilde(k*(N)).

    Comparing N with n_tilde keeps integer resolution where consecutive
    fidelities differ by less than a unit in the last place.
    """
    if delta <= power(lam, n_tests):
        return False
    terms, scale = _n_tilde_terms(epsilon, delta, lam, _k_star(n_tests, delta, lam))
    # rounding slack scales with the terms before cancellation
    slack = min(TILDE_MAX_SLACK, TILDE_REL_TOL * math.fsum(abs(term) for term in terms) / scale)
    return n_tests >= math.fsum(terms) / scale - slack


def _settle_minimal(anchor: int, epsilon: float, delta: float, lam: float) -> int:
    """Smallest N >= 1 that suffices: doubling steps away from anchor, then bisection."""

    def suffices(n_tests: int) -> bool:
        return _suffices(n_tests, epsilon, delta, lam)

    anchor = max(1, anchor)
    step = 1
    if suffices(anchor):
        hi, lo = anchor, anchor - 1
        while lo >= 1 and suffices(lo):
            hi, step = lo, step * 2
            lo = hi - step
        lo = max(lo, 0)
    else:
        lo, hi = anchor, anchor + 1
        while not suffices(hi):
            lo, step = hi, step * 2
            hi = lo + step
    # lo fails (or is 0), hi suffices
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if suffices(mid):
            hi = mid
        else:
            lo = mid
    return hi


def tests_homogeneous(precision: Precision, lam: float) -> HomogeneousPlan:
    """Exact N(eps, delta, lambda) with the closed-form sandwich and approximation.

    The candidate k_opt gives an anchor ceil(n_tilde(k_opt)); the exact count
    is then settled by a logarithmic search on the defining inequality.

    Args:
        precision: Target infidelity eps and significance delta.
        lam: Common non-target eigenvalue, in [0, 1); 0 is the singular case.

    Returns:
        HomogeneousPlan with n_exact, k_opt and the bounds
        n_lower <= n_exact <= n_upper (equal when delta is an integer power of
        lambda); n_approx, k_minus and k_plus are absent for lambda = 0.
    """
    epsilon, delta = precision.epsilon, precision.delta
    fidelity = precision.fidelity

    if lam == 0.0:
        n_exact = tests_singular(precision)
        return HomogeneousPlan(n_exact=n_exact, k_opt=0, n_lower=n_exact, n_upper=n_exact)

    nu = 1.0 - lam
    log_lam = math.log(lam)
    log_ratio = math.log(delta) / log_lam
    k_minus = floor_guarded(log_ratio)
    k_plus = ceil_guarded(log_ratio)

    # ---- exact count ----
    pass_cap = fidelity + lam * epsilon
    k_opt = _largest_k(
        lambda k: delta <= power(lam, k) / pass_cap,
        start=floor_guarded(math.log(delta * pass_cap) / log_lam) + SCAN_WINDOW,
    )
    n_exact = _settle_minimal(ceil_guarded(n_tilde(epsilon, delta, lam, k_opt)), epsilon, delta, lam)

    # ---- closed-form sandwich ----
    n_lower = k_minus + ceil_guarded(k_minus * fidelity / (lam * epsilon))
    n_upper = ceil_guarded(math.log(delta) / (lam * epsilon * log_lam) - nu * k_minus / lam)
    logger.debug(
        "tests_homogeneous(): lambda=%r eps=%r delta=%r -> k_opt=%d n=%d in [%d, %d]",
        lam,
        epsilon,
        delta,
        k_opt,
        n_exact,
        n_lower,
        n_upper,
    )
    return HomogeneousPlan(
        n_exact=n_exact,
        k_opt=k_opt,
        n_lower=n_lower,
        n_upper=n_upper,
        n_approx=tests_homogeneous_approx(precision, lam),
        k_minus=k_minus,
        k_plus=k_plus,
    )
