import math

import pytest

from qsvplan.core.nonadversarial import accept_probability_bound, max_pass_probability, tests_needed_na
from qsvplan.models import Precision


def test_max_pass_probability():
    assert max_pass_probability(0.5, 0.2) == pytest.approx(0.9)
    assert max_pass_probability(1.0, 1.0 - 1e-12) == pytest.approx(0.0, abs=1e-11)
    assert max_pass_probability(0.3, 1e-15) == pytest.approx(1.0)


def test_accept_probability_bound():
    assert accept_probability_bound(0.5, 0.0, 17) == 1.0
    assert accept_probability_bound(1.0, 1.0, 3) == 0.0
    assert accept_probability_bound(0.5, 0.1, 10) == pytest.approx(0.598737, abs=1e-6)


@pytest.mark.parametrize(
    "nu, epsilon, delta, n_exact",
    [
        (1.0, 0.5, 0.5, 1),
        (0.5, 0.01, 0.01, 919),
        (1.0, 0.01, 0.01, 459),
    ],
)
def test_tests_needed_na(nu, epsilon, delta, n_exact):
    plan = tests_needed_na(nu, Precision(epsilon=epsilon, delta=delta))
    assert plan.n_exact == n_exact


def test_closed_form_upper_bound():
    assert tests_needed_na(0.5, Precision(epsilon=0.01, delta=0.01)).n_upper == 922


@pytest.mark.parametrize("nu", [0.1, 0.5, 2.0 / 3.0, 1.0])
@pytest.mark.parametrize("epsilon, delta", [(0.1, 0.1), (0.05, 0.2), (0.01, 1e-3), (0.3, 0.5)])
def test_n_exact_is_minimal_by_direct_scan(nu, epsilon, delta):
    plan = tests_needed_na(nu, Precision(epsilon=epsilon, delta=delta))
    log_pass = math.log1p(-nu * epsilon)
    expected = next(n for n in range(0, 10**6) if n * log_pass <= math.log(delta))
    assert plan.n_exact == expected
    assert plan.n_exact <= plan.n_upper


def test_two_over_epsilon_scaling_for_half_gap():
    epsilon = delta = 1e-3
    plan = tests_needed_na(0.5, Precision(epsilon=epsilon, delta=delta))
    assert plan.n_exact == pytest.approx(2.0 / epsilon * math.log(1.0 / delta), rel=0.02)
