"""Brute-force worst-case adversary over permutation-symmetric eigenbasis products.

Each configuration places ``counts[i]`` of the N + 1 copies in an eigenvector
with the i-th distinct eigenvalue (index 0 is the target). One copy is left
untested uniformly at random. Mixtures of configurations form a polytope on
which the conditional fidelity is linear-fractional; with the single
constraint "pass probability >= delta" its minimum sits on a single
configuration or on the segment between two configurations where the
constraint is active, so enumerating those is exact.
"""

from collections.abc import Iterator, Sequence

import numpy as np

from qsvplan.errors import GuardError, InfeasibleError
from qsvplan.logger import get_logger
from qsvplan.models import AdversaryConfiguration, EigenSpectrum, MixtureComponent, OracleResult

logger = get_logger(__name__)

MAX_DISTINCT = 4
MAX_TESTS_TWO_VALUES = 30
MAX_TESTS_MANY_VALUES = 8


def check_guard(distinct: int, n_tests: int) -> None:
    """Raise GuardError when the configuration count would be too large."""
    if distinct > MAX_DISTINCT:
        raise GuardError(f"{distinct} distinct eigenvalues exceed the supported maximum {MAX_DISTINCT}")
    limit = MAX_TESTS_TWO_VALUES if distinct <= 2 else MAX_TESTS_MANY_VALUES
    if not 1 <= n_tests <= limit:
        raise GuardError(f"N = {n_tests} is outside [1, {limit}] for {distinct} distinct eigenvalues")


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def configuration_probabilities(values: Sequence[float], counts: Sequence[int]) -> tuple[float, float]:
    """Pass probability and fidelity-weighted probability of one configuration.

    The leave-one-out products skip the untested copy explicitly instead of
    dividing, so zero eigenvalues stay exact.
    """
    copies = sum(counts)
    pass_prob = 0.0
    for i, count in enumerate(counts):
        if count == 0:
            continue
        product = 1.0
        for j, (value, other) in enumerate(zip(values, counts)):
            product *= value ** (other - 1 if j == i else other)
        pass_prob += count / copies * product
    fid_prob = counts[0] / copies
    for value, count in zip(values[1:], counts[1:]):
        fid_prob *= value**count
    return pass_prob, fid_prob


def enumerate_configurations(spectrum: EigenSpectrum, n_tests: int) -> list[AdversaryConfiguration]:
    """Every composition of N + 1 copies over the distinct eigenvalues."""
    values = spectrum.values
    check_guard(len(values), n_tests)
    configurations = []
    for counts in _compositions(n_tests + 1, len(values)):
        pass_prob, fid_prob = configuration_probabilities(values, counts)
        configurations.append(
            AdversaryConfiguration(
                counts=list(counts),
                pass_prob=min(1.0, pass_prob),
                fid_prob=min(pass_prob, fid_prob),
            )
        )
    logger.debug("enumerate_configurations(): %d configurations for N=%d", len(configurations), n_tests)
    return configurations


def min_fidelity_lp(spectrum: EigenSpectrum, n_tests: int, delta: float) -> OracleResult:
    """Minimum of (sum q f) / (sum q p) over mixtures with sum q p >= delta.

    Args:
        spectrum: Spectrum of the verification operator, target first.
        n_tests: Number of tests N; N + 1 copies are prepared.
        delta: Required pass probability of the adversary, in (0, 1].

    Returns:
        OracleResult with the minimum conditional fidelity, the one or two
        configurations attaining it and their pass probability as computed
        (a two-point mixture hits delta up to rounding).

    Raises:
        GuardError: if the configuration guard is exceeded.
        InfeasibleError: if no configuration passes with probability delta.
    """
    configurations = enumerate_configurations(spectrum, n_tests)
    pass_probs = np.array([c.pass_prob for c in configurations])
    fid_probs = np.array([c.fid_prob for c in configurations])
    if not 0.0 < delta <= pass_probs.max():
        raise InfeasibleError(f"no adversary passes N = {n_tests} tests with probability {delta!r}")

    high = np.flatnonzero(pass_probs >= delta)
    low = np.flatnonzero(pass_probs < delta)

    single_ratios = fid_probs[high] / pass_probs[high]
    best_single = int(np.argmin(single_ratios))
    best_value = float(single_ratios[best_single])
    support = [MixtureComponent(configuration=configurations[high[best_single]], weight=1.0)]
    achieved = float(pass_probs[high[best_single]])

    if low.size:
        # mix a high and a low configuration so that the pass probability is exactly delta
        p_a = pass_probs[high][:, None]
        p_b = pass_probs[low][None, :]
        f_a = fid_probs[high][:, None]
        f_b = fid_probs[low][None, :]
        weight_a = (delta - p_b) / (p_a - p_b)
        pair_values = (weight_a * f_a + (1.0 - weight_a) * f_b) / delta
        flat = int(np.argmin(pair_values))
        row, col = np.unravel_index(flat, pair_values.shape)
        if pair_values[row, col] < best_value:
            best_value = float(pair_values[row, col])
            q = float(weight_a[row, col])
            support = [
                MixtureComponent(configuration=configurations[high[row]], weight=q),
                MixtureComponent(configuration=configurations[low[col]], weight=1.0 - q),
            ]
            achieved = q * float(pass_probs[high[row]]) + (1.0 - q) * float(pass_probs[low[col]])

    return OracleResult(
        min_fidelity=min(1.0, max(0.0, best_value)),
        support=support,
        achieved_pass_prob=achieved,
        delta=delta,
    )


def mixture_probabilities(spectrum: EigenSpectrum, mixture: Sequence[MixtureComponent]) -> tuple[float, float]:
    """Pass probability and fidelity-weighted probability of a mixture."""
    values = spectrum.values
    pass_prob = fid_prob = 0.0
    for component in mixture:
        p_c, f_c = configuration_probabilities(values, component.configuration.counts)
        pass_prob += component.weight * p_c
        fid_prob += component.weight * f_c
    return pass_prob, fid_prob
