import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsvplan.core.homogeneous import (
    fidelity_homogeneous,
    fidelity_singular,
    n_tilde,
    tests_homogeneous,
    tests_homogeneous_approx,
    tests_singular,
    zeta,
)
from qsvplan.models import Precision

INV_E = 1.0 / math.e


def meets(fidelity, target):
    return fidelity >= target - 1e-15


# ---- singular (lambda = 0) ----
def test_fidelity_singular():
    assert fidelity_singular(10, 0.5) == pytest.approx(0.9)
    assert fidelity_singular(7, 1.0 / 8.0) == pytest.approx(0.0, abs=1e-12)
    assert fidelity_singular(10**6, 0.999) == pytest.approx(1.0 - 0.001 / (10**6 * 0.999), abs=1e-12)


@pytest.mark.parametrize("epsilon, delta, expected", [(0.1, 0.1, 90), (0.01, 0.01, 9900), (0.1, 0.99, 1)])
def test_tests_singular(epsilon, delta, expected):
    assert tests_singular(Precision(epsilon=epsilon, delta=delta)) == expected


@pytest.mark.parametrize("epsilon, delta", [(0.1, 0.1), (0.05, 0.3), (0.2, 0.02)])
def test_tests_singular_is_minimal(epsilon, delta):
    n = tests_singular(Precision(epsilon=epsilon, delta=delta))
    assert meets(fidelity_singular(n, delta), 1.0 - epsilon)
    if n > 1:
        assert not meets(fidelity_singular(n - 1, delta), 1.0 - epsilon)


def test_singular_fidelity_reports_k_star():
    assert fidelity_homogeneous(10, 0.05, 0.0).k_star == 1
    assert fidelity_homogeneous(10, 0.5, 0.0).k_star == 0
    assert not fidelity_homogeneous(10, 0.5, 0.0).zero_regime


def test_singular_plan_collapses_the_sandwich():
    plan = tests_homogeneous(Precision(epsilon=0.1, delta=0.1), 0.0)
    assert plan.n_exact == plan.n_lower == plan.n_upper == 90
    assert plan.n_approx is None


# ---- zeta and F(N, delta, lambda) ----
def test_zeta():
    assert zeta(2, 0.8, 0.5, 0) == pytest.approx(0.6)
    assert zeta(2, 0.6, 0.5, 1) == pytest.approx(0.2 / 0.75)
    assert zeta(4, 1.0 / (1.0 + 4 * 0.5), 0.5, 0) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize(
    "n_tests, delta, fidelity, k_star",
    [
        (2, 0.8, 0.75, 0),
        (2, 0.6, 4.0 / 9.0, 1),
    ],
)
def test_fidelity_homogeneous(n_tests, delta, fidelity, k_star):
    result = fidelity_homogeneous(n_tests, delta, 0.5)
    assert result.fidelity == pytest.approx(fidelity)
    assert result.k_star == k_star
    assert not result.zero_regime


def test_zero_regime_is_inclusive():
    result = fidelity_homogeneous(5, 0.5**5, 0.5)
    assert result.zero_regime
    assert result.fidelity == 0.0
    assert result.k_star is None


def test_k_star_is_the_largest_k_meeting_the_pass_weight():
    n_tests, delta, lam = 20, 0.03, 0.6
    result = fidelity_homogeneous(n_tests, delta, lam)

    def weight(k):
        return (n_tests + 1 - k) * lam**k + k * lam ** (k - 1)

    assert weight(result.k_star) >= (n_tests + 1) * delta
    assert weight(result.k_star + 1) < (n_tests + 1) * delta


@settings(max_examples=200, deadline=None)
@given(
    lam=st.floats(min_value=0.05, max_value=0.95),
    n_tests=st.integers(min_value=1, max_value=40),
    delta=st.floats(min_value=1e-4, max_value=1.0),
)
def test_fidelity_is_a_probability_and_monotone_in_n(lam, n_tests, delta):
    here = fidelity_homogeneous(n_tests, delta, lam).fidelity
    after = fidelity_homogeneous(n_tests + 1, delta, lam).fidelity
    assert 0.0 <= here <= 1.0
    assert after >= here - 1e-12


# ---- n_tilde and N(eps, delta, lambda) ----
def test_n_tilde():
    assert n_tilde(0.1, 0.1, 0.5, 3) == pytest.approx(62.0)
    assert n_tilde(0.2, 0.5, 0.5, 1) == pytest.approx(9.0)
    # k = 0 reduces to (1 - delta) / (nu delta eps)
    assert n_tilde(0.1, 0.2, 0.3, 0) == pytest.approx(0.8 / (0.7 * 0.2 * 0.1))


def test_tests_homogeneous_worked_point():
    plan = tests_homogeneous(Precision(epsilon=0.1, delta=0.1), 0.5)
    assert plan.n_exact == 62
    assert plan.k_opt == 3
    assert plan.n_lower == 57
    assert plan.n_upper == 64
    assert plan.k_minus == 3
    assert plan.k_plus == 4
    assert plan.n_approx == pytest.approx(66.44, abs=0.01)


def test_tests_homogeneous_approx():
    assert tests_homogeneous_approx(Precision(epsilon=0.1, delta=0.1), 0.5) == pytest.approx(66.4386, abs=1e-3)
    assert tests_homogeneous_approx(Precision(epsilon=0.01, delta=0.001), INV_E) == pytest.approx(
        math.e * 100 * math.log(1000.0)
    )


def test_approximation_depends_only_on_lambda_ln_lambda():
    # 1/4 and 1/2 share lambda ln(1/lambda) = ln(2)/2
    precision = Precision(epsilon=0.01, delta=0.01)
    assert tests_homogeneous_approx(precision, 0.25) == pytest.approx(tests_homogeneous_approx(precision, 0.5))


@pytest.mark.parametrize("lam", [0.2, 0.5, INV_E, 0.8])
@pytest.mark.parametrize("epsilon", [0.3, 0.1, 0.03])
@pytest.mark.parametrize("delta", [0.3, 0.1, 0.03])
def test_n_exact_matches_direct_scan(lam, epsilon, delta):
    plan = tests_homogeneous(Precision(epsilon=epsilon, delta=delta), lam)
    expected = next(n for n in range(1, 100_000) if meets(fidelity_homogeneous(n, delta, lam).fidelity, 1.0 - epsilon))
    assert plan.n_exact == expected
    assert plan.n_lower <= plan.n_exact <= plan.n_upper


@pytest.mark.parametrize("lam", [0.3, 0.5])
@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("epsilon", [0.1, 0.01])
def test_sandwich_saturates_at_integer_powers(lam, m, epsilon):
    plan = tests_homogeneous(Precision(epsilon=epsilon, delta=lam**m), lam)
    assert plan.n_lower == plan.n_exact == plan.n_upper


def test_one_over_e_worked_point_lies_in_the_sandwich():
    plan = tests_homogeneous(Precision(epsilon=0.01, delta=0.001), INV_E)
    assert plan.n_exact == 1855
    assert plan.n_lower <= plan.n_exact <= plan.n_upper
    assert plan.n_exact == pytest.approx(plan.n_approx, rel=0.02)


@settings(max_examples=200, deadline=None)
@given(
    lam=st.floats(min_value=0.02, max_value=0.98),
    epsilon=st.floats(min_value=1e-4, max_value=0.5),
    delta=st.floats(min_value=1e-6, max_value=0.9),
)
def test_exact_count_is_minimal_and_inside_the_sandwich(lam, epsilon, delta):
    plan = tests_homogeneous(Precision(epsilon=epsilon, delta=delta), lam)
    assert plan.n_lower <= plan.n_exact <= plan.n_upper
    assert meets(fidelity_homogeneous(plan.n_exact, delta, lam).fidelity, 1.0 - epsilon)
    if plan.n_exact > 1:
        assert not meets(fidelity_homogeneous(plan.n_exact - 1, delta, lam).fidelity, 1.0 - epsilon)


# ---- precision extremes ----
def test_saturation_at_tiny_epsilon_keeps_the_count_exact():
    plan = tests_homogeneous(Precision(epsilon=1e-6, delta=0.9), 0.9)
    assert plan.n_exact == plan.n_lower == plan.n_upper == 1_111_111


@pytest.mark.parametrize("lam, delta", [(0.001, 0.001), (0.001, 1e-9)])
def test_saturation_with_large_counts_does_not_break_the_bounds(lam, delta):
    plan = tests_homogeneous(Precision(epsilon=1e-6, delta=delta), lam)
    assert plan.n_lower <= plan.n_exact <= plan.n_upper


def test_near_singular_count_sits_at_the_candidate_ceiling():
    epsilon, delta, lam = 1e-6, 1e-9, 1e-6
    plan = tests_homogeneous(Precision(epsilon=epsilon, delta=delta), lam)
    assert plan.k_opt == 1
    candidate = n_tilde(epsilon, delta, lam, 1)
    assert candidate == pytest.approx(1_000_998_001_000.001, rel=1e-12)
    # the fractional part of the candidate is within rounding slack of zero
    assert math.ceil(candidate) - 1 <= plan.n_exact <= math.ceil(candidate)
    assert plan.n_lower <= plan.n_exact <= plan.n_upper


@pytest.mark.parametrize("lam", [1e-9, 1e-12])
def test_extreme_near_singular_lambda_is_fast_and_bracketed(lam):
    plan = tests_homogeneous(Precision(epsilon=1e-6, delta=1e-7), lam)
    assert plan.n_lower <= plan.n_exact <= plan.n_upper
    # lambda -> 0 approaches the singular count from above
    assert plan.n_exact > tests_singular(Precision(epsilon=1e-6, delta=1e-7))
