"""Monte Carlo validation of the acceptance bound and of adversary mixtures.

Trials are split into fixed-size blocks. Block b draws from a Philox
generator keyed by the seed with b in the top counter word, so every block
owns a disjoint, reproducible stream and the result does not depend on how
many workers process the blocks.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from qsvplan.config import Settings
from qsvplan.core.oracle import check_guard, mixture_probabilities
from qsvplan.errors import StrategyError
from qsvplan.logger import get_logger
from qsvplan.models import EigenSpectrum, MixtureComponent, SimConfig, SimReport, StrategySummary

logger = get_logger(__name__)

MAX_BLOCK_TRIALS = 1 << 16
# bound on uniforms drawn per block
MAX_BLOCK_DRAWS = 1 << 22


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Generator for one block: key = seed, block index in the top 64 bits of the counter."""
    return np.random.Generator(np.random.Philox(key=seed, counter=block << 192))


def _block_sizes(trials: int, draws_per_trial: int) -> list[int]:
    size = max(1, min(MAX_BLOCK_TRIALS, MAX_BLOCK_DRAWS // max(1, draws_per_trial)))
    full, rest = divmod(trials, size)
    return [size] * full + ([rest] if rest else [])


def _run_blocks(
    sizes: list[int],
    worker: Callable[[int, int], tuple[int, int]],
    settings: Settings | None,
) -> tuple[int, int]:
    settings = settings or Settings.from_env()
    workers = min(settings.worker_count, len(sizes))
    if workers <= 1:
        results = [worker(block, size) for block, size in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(worker, range(len(sizes)), sizes))
    # exact integer merge
    return sum(r[0] for r in results), sum(r[1] for r in results)


def _z_score(empirical: float, predicted: float, trials: int) -> float | None:
    if not 0.0 < predicted < 1.0:
        return None
    return (empirical - predicted) / math.sqrt(predicted * (1.0 - predicted) / trials)


def simulate_iid(summary: StrategySummary, config: SimConfig, settings: Settings | None = None) -> SimReport:
    """Independent worst-case copies: copy j passes with probability 1 - nu eps_j."""
    if config.mode != "iid" or config.per_copy_infidelities is None:
        raise StrategyError("simulate_iid needs an iid-mode configuration")
    pass_probs = np.array([1.0 - summary.nu * eps for eps in config.per_copy_infidelities])
    predicted = math.prod(pass_probs.tolist())
    sizes = _block_sizes(config.trials, config.n_tests)

    def worker(block: int, size: int) -> tuple[int, int]:
        rng = block_generator(config.seed, block)
        draws = rng.random((size, config.n_tests))
        return int(np.count_nonzero((draws < pass_probs).all(axis=1))), 0

    acceptances, _ = _run_blocks(sizes, worker, settings)
    empirical = acceptances / config.trials
    logger.debug("simulate_iid(): %d/%d accepted, predicted %r", acceptances, config.trials, predicted)
    return SimReport(
        trials=config.trials,
        acceptances=acceptances,
        empirical_rate=empirical,
        predicted_rate=predicted,
        z_score=_z_score(empirical, predicted, config.trials),
    )


def simulate_adversary(
    spectrum: EigenSpectrum,
    mixture: list[MixtureComponent],
    n_tests: int,
    trials: int,
    seed: int,
    settings: Settings | None = None,
) -> SimReport:
    """Sample configurations, untested positions and per-copy pass events physically."""
    values = spectrum.values
    check_guard(len(values), n_tests)
    config = SimConfig(mode="adversary", mixture=mixture, n_tests=n_tests, trials=trials, seed=seed)
    copies = n_tests + 1
    for component in mixture:
        if len(component.configuration.counts) != len(values):
            raise StrategyError("configuration counts do not match the spectrum")

    # copy-level eigenvalue layout of each configuration
    layouts = np.array(
        [np.repeat(values, component.configuration.counts) for component in mixture], dtype=float
    )
    on_target = np.array(
        [np.repeat(np.arange(len(values)) == 0, component.configuration.counts) for component in mixture]
    )
    weights = np.array([component.weight for component in mixture])
    weights = weights / weights.sum()
    sizes = _block_sizes(trials, copies)

    def worker(block: int, size: int) -> tuple[int, int]:
        rng = block_generator(config.seed, block)
        chosen = rng.choice(len(mixture), size=size, p=weights)
        untested = rng.integers(0, copies, size=size)
        passes = rng.random((size, copies)) < layouts[chosen]
        rows = np.arange(size)
        passes[rows, untested] = True
        accepted = passes.all(axis=1)
        hits = accepted & on_target[chosen, untested]
        return int(np.count_nonzero(accepted)), int(np.count_nonzero(hits))

    acceptances, target_hits = _run_blocks(sizes, worker, settings)
    predicted_pass, predicted_fid = mixture_probabilities(spectrum, mixture)
    empirical = acceptances / trials
    logger.debug(
        "simulate_adversary(): %d/%d accepted, %d with the target untested",
        acceptances,
        trials,
        target_hits,
    )
    return SimReport(
        trials=trials,
        acceptances=acceptances,
        empirical_rate=empirical,
        predicted_rate=min(1.0, predicted_pass),
        z_score=_z_score(empirical, predicted_pass, trials),
        conditional_fidelity_estimate=target_hits / acceptances if acceptances else None,
        predicted_conditional_fidelity=predicted_fid / predicted_pass if predicted_pass > 0 else None,
    )
