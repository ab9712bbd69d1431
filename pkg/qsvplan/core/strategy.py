"""Verification operators, their spectra and spectral summaries."""

from __future__ import annotations

import math
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from qsvplan.errors import StrategyError
from qsvplan.logger import get_logger
from qsvplan.models import (
    HERMITIAN_TOL,
    PROBABILITY_SUM_TOL,
    EigenSpectrum,
    OperatorFile,
    SpectrumEntry,
    StrategySummary,
    TargetState,
    TestSpec,
)

logger = get_logger(__name__)

TARGET_ACCEPT_TOL = 1e-8
EIGENVALUE_WINDOW = 1e-8
GROUPING_REL_TOL = 1e-9
GROUPING_ABS_TOL = 1e-12
MAX_DIM = 4096


def _check_hermitian(matrix: np.ndarray, what: str) -> None:
    deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
    if deviation > HERMITIAN_TOL:
        raise StrategyError(f"{what} is not Hermitian (max deviation {deviation:.3e})")


def build_verification_operator(tests: Sequence[TestSpec], target: TargetState) -> np.ndarray:
    """Return Omega = sum_l mu_l E_l after validating every test against the target.

    Raises:
        StrategyError: on dimension mismatch, probabilities not summing to 1,
            a non-Hermitian test, a test eigenvalue outside [0, 1], or a test
            that does not accept the target with certainty.
    """
    if not tests:
        raise StrategyError("at least one test is required")
    psi = target.to_array()
    dim = psi.shape[0]
    total = math.fsum(test.probability for test in tests)
    if abs(total - 1.0) > PROBABILITY_SUM_TOL:
        raise StrategyError(f"test probabilities sum to {total!r}, not 1")

    omega = np.zeros((dim, dim), dtype=complex)
    for index, test in enumerate(tests):
        if test.dim != dim:
            raise StrategyError(f"test {index} has dimension {test.dim}, target has {dim}")
        matrix = test.to_array()
        _check_hermitian(matrix, f"test {index}")
        eigenvalues = np.linalg.eigvalsh(matrix)
        if eigenvalues[0] < -EIGENVALUE_WINDOW or eigenvalues[-1] > 1.0 + EIGENVALUE_WINDOW:
            raise StrategyError(f"test {index} has eigenvalues outside [0, 1]")
        miss = float(np.linalg.norm(matrix @ psi - psi))
        if miss > TARGET_ACCEPT_TOL:
            raise StrategyError(f"test {index} does not accept the target state (deviation {miss:.3e})")
        omega += test.probability * matrix

    logger.debug("build_verification_operator(): combined %d tests of dimension %d", len(tests), dim)
    return omega


def _group_descending(values: Sequence[float]) -> list[tuple[float, int]]:
    groups: list[list[float]] = []
    for value in values:
        if groups and math.isclose(groups[-1][0], value, rel_tol=GROUPING_REL_TOL, abs_tol=GROUPING_ABS_TOL):
            groups[-1].append(value)
        else:
            groups.append([value])
    return [(math.fsum(group) / len(group), len(group)) for group in groups]


def spectrum_from_operator(omega: np.ndarray, target: TargetState) -> EigenSpectrum:
    """Eigendecompose Omega into a descending spectrum with an exact target eigenvalue 1.

    Raises:
        StrategyError: if Omega is too large, not Hermitian, does not fix the
            target, has eigenvalues outside [0, 1], or has a degenerate
            eigenvalue 1 (zero spectral gap).
    """
    omega = np.asarray(omega, dtype=complex)
    dim = omega.shape[0]
    if omega.shape != (dim, dim) or dim < 2:
        raise StrategyError(f"operator must be a square matrix of dimension >= 2, got shape {omega.shape}")
    if dim > MAX_DIM:
        raise StrategyError(f"operator dimension {dim} exceeds the supported maximum {MAX_DIM}")
    if target.dim != dim:
        raise StrategyError(f"target has dimension {target.dim}, operator has {dim}")
    _check_hermitian(omega, "verification operator")
    psi = target.to_array()
    miss = float(np.linalg.norm(omega @ psi - psi))
    if miss > TARGET_ACCEPT_TOL:
        raise StrategyError(f"verification operator does not fix the target (deviation {miss:.3e})")

    eigenvalues = np.linalg.eigvalsh(omega)[::-1]
    if eigenvalues[-1] < -EIGENVALUE_WINDOW or eigenvalues[0] > 1.0 + EIGENVALUE_WINDOW:
        raise StrategyError(
            f"eigenvalues must lie in [0, 1]; found range [{eigenvalues[-1]!r}, {eigenvalues[0]!r}]"
        )
    eigenvalues = np.clip(eigenvalues, 0.0, 1.0)

    groups = _group_descending(eigenvalues.tolist())
    top_value, top_multiplicity = groups[0]
    if not math.isclose(top_value, 1.0, rel_tol=GROUPING_REL_TOL, abs_tol=GROUPING_ABS_TOL):
        raise StrategyError(f"largest eigenvalue {top_value!r} is not 1")
    if top_multiplicity > 1:
        raise StrategyError(
            f"eigenvalue 1 has multiplicity {top_multiplicity}: the spectral gap is zero and "
            "the strategy cannot verify the target"
        )
    entries = [SpectrumEntry(value=1.0, multiplicity=1)]
    entries += [SpectrumEntry(value=value, multiplicity=count) for value, count in groups[1:]]
    logger.debug("spectrum_from_operator(): %d distinct eigenvalues in dimension %d", len(entries), dim)
    return EigenSpectrum(entries=entries)


def summarize(spectrum: EigenSpectrum) -> StrategySummary:
    """Reduce a spectrum to beta, nu, tau and (if homogeneous) lambda."""
    beta = spectrum.entries[1].value
    tau = spectrum.entries[-1].value
    homogeneous = len(spectrum.entries) == 2
    return StrategySummary(
        beta=beta,
        nu=1.0 - beta,
        tau=tau,
        homogeneous=homogeneous,
        lambda_=beta if homogeneous else None,
    )


def _check_hedge_probability(p: float) -> None:
    if not 0.0 <= p < 1.0:
        raise StrategyError(f"hedging probability must lie in [0, 1), got {p!r}")


def hedge(summary: StrategySummary, p: float) -> StrategySummary:
    """Summary of Omega_p = p + (1 - p) Omega."""
    _check_hedge_probability(p)
    if p == 0.0:
        return summary
    beta_p = p + (1.0 - p) * summary.beta
    tau_p = p + (1.0 - p) * summary.tau
    return StrategySummary(
        beta=beta_p,
        nu=(1.0 - p) * summary.nu,
        tau=tau_p,
        homogeneous=summary.homogeneous,
        lambda_=beta_p if summary.homogeneous else None,
    )


def hedge_spectrum(spectrum: EigenSpectrum, p: float) -> EigenSpectrum:
    """Apply v -> p + (1 - p) v to every non-target eigenvalue."""
    _check_hedge_probability(p)
    entries = [spectrum.entries[0]]
    entries += [
        SpectrumEntry(value=p + (1.0 - p) * entry.value, multiplicity=entry.multiplicity)
        for entry in spectrum.entries[1:]
    ]
    return EigenSpectrum(entries=entries)


def homogeneous_spectrum(lam: float, dim: int = 2) -> EigenSpectrum:
    """Spectrum of |Psi><Psi| + lambda (1 - |Psi><Psi|) in dimension dim."""
    if dim < 2:
        raise StrategyError("dimension must be at least 2")
    if not 0.0 <= lam < 1.0:
        raise StrategyError(f"lambda must lie in [0, 1), got {lam!r}")
    return EigenSpectrum(
        entries=[SpectrumEntry(value=1.0, multiplicity=1), SpectrumEntry(value=lam, multiplicity=dim - 1)]
    )


def parse_spectrum(text: str) -> EigenSpectrum:
    """Parse "1:1,0.5:3,0.1:2" (value:multiplicity pairs, descending)."""
    entries = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        value, sep, multiplicity = chunk.partition(":")
        try:
            entries.append(
                SpectrumEntry(value=float(value), multiplicity=int(multiplicity) if sep else 1)
            )
        except ValueError as exc:
            raise StrategyError(f"invalid spectrum entry {chunk!r}: {exc}") from exc
    try:
        return EigenSpectrum(entries=entries)
    except ValueError as exc:
        raise StrategyError(f"invalid spectrum {text!r}: {exc}") from exc


def load_operator_file(path: str | Path) -> tuple[list[TestSpec], TargetState]:
    """Read the operator JSON format into tests and a target state."""
    path = Path(path)
    logger.debug("load_operator_file(): reading %s", path)
    try:
        document = OperatorFile.model_validate_json(path.read_text(encoding="utf-8"))
        target = TargetState(amplitudes=document.target_state)
    except ValueError as exc:
        raise StrategyError(f"invalid operator file {path}: {exc}") from exc
    return list(document.tests), target


def spectrum_from_file(path: str | Path) -> EigenSpectrum:
    tests, target = load_operator_file(path)
    return spectrum_from_operator(build_verification_operator(tests, target), target)
