"""Pydantic models for qsvplan."""

import math
from typing import Literal

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    computed_field,
    field_validator,
    model_validator,
)

# numerical tolerances for ingestion
PROBABILITY_SUM_TOL = 1e-9
HERMITIAN_TOL = 1e-10
TARGET_NORM_TOL = 1e-10
UINT64_MAX = 2**64 - 1

Complex = tuple[float, float]


class SpectrumEntry(BaseModel):
    """One distinct eigenvalue of a verification operator and its multiplicity."""

    model_config = ConfigDict(frozen=True)

    value: float = Field(
        ge=0.0,
        le=1.0,
        description="Eigenvalue in [0, 1]",
        examples=[1.0, 0.5],
    )
    multiplicity: int = Field(
        ge=1,
        description="Number of times the eigenvalue occurs",
        examples=[1, 3],
    )


class EigenSpectrum(BaseModel):
    """Full eigenvalue profile of a verification operator, descending by value.

    The first entry is the target eigenvalue: exactly 1 with multiplicity 1.
    """

    model_config = ConfigDict(frozen=True)

    entries: list[SpectrumEntry] = Field(
        min_length=2,
        description="(value, multiplicity) pairs sorted strictly descending by value",
        examples=[[{"value": 1.0, "multiplicity": 1}, {"value": 0.5, "multiplicity": 3}]],
    )

    @model_validator(mode="after")
    def _check_shape(self) -> "EigenSpectrum":
        top = self.entries[0]
        if top.value != 1.0 or top.multiplicity != 1:
            raise ValueError("the first spectrum entry must be the target eigenvalue 1 with multiplicity 1")
        rest = [entry.value for entry in self.entries[1:]]
        if any(value >= 1.0 for value in rest):
            raise ValueError("non-target eigenvalues must lie in [0, 1)")
        if any(a <= b for a, b in zip(rest, rest[1:])):
            raise ValueError("spectrum entries must be strictly descending by value")
        return self

    @computed_field
    @property
    def dim(self) -> int:
        return sum(entry.multiplicity for entry in self.entries)

    @property
    def values(self) -> list[float]:
        """Distinct eigenvalues, descending."""
        return [entry.value for entry in self.entries]


class StrategySummary(BaseModel):
    """Spectral summary of a verification strategy: beta, nu, tau and lambda."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    beta: float = Field(ge=0.0, lt=1.0, description="Second largest eigenvalue", examples=[0.5])
    nu: float = Field(gt=0.0, le=1.0, description="Spectral gap 1 - beta", examples=[0.5])
    tau: float = Field(ge=0.0, lt=1.0, description="Smallest eigenvalue", examples=[0.1])
    homogeneous: bool = Field(
        description="True iff every non-target eigenvalue is equal",
        examples=[False],
    )
    lambda_: float | None = Field(
        default=None,
        alias="lambda",
        description="Common non-target eigenvalue of a homogeneous strategy",
        examples=[None, 0.5],
    )

    @model_validator(mode="after")
    def _check_consistency(self) -> "StrategySummary":
        if self.tau > self.beta:
            raise ValueError("tau must not exceed beta")
        if abs(self.nu - (1.0 - self.beta)) > 1e-12:
            raise ValueError("nu must equal 1 - beta")
        if self.homogeneous:
            if self.lambda_ is None or not (self.lambda_ == self.beta == self.tau):
                raise ValueError("a homogeneous summary needs lambda = beta = tau")
        elif self.lambda_ is not None:
            raise ValueError("lambda is only defined for homogeneous strategies")
        return self

    @property
    def singular(self) -> bool:
        return self.tau == 0.0


class TestSpec(BaseModel):
    """A test operator E_l performed with probability mu_l."""

    __test__ = False
    model_config = ConfigDict(frozen=True)

    probability: float = Field(
        gt=0.0,
        le=1.0,
        description="Probability mu_l of performing the test",
        examples=[0.5],
    )
    matrix: list[list[Complex]] = Field(
        description="dim x dim Hermitian matrix, each entry a [re, im] pair",
        examples=[[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]],
    )

    @field_validator("matrix")
    @classmethod
    def _check_square(cls, matrix: list[list[Complex]]) -> list[list[Complex]]:
        size = len(matrix)
        if size == 0 or any(len(row) != size for row in matrix):
            raise ValueError("test matrix must be square and non-empty")
        return matrix

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def to_array(self) -> np.ndarray:
        raw = np.asarray(self.matrix, dtype=float)
        return raw[..., 0] + 1j * raw[..., 1]


class TargetState(BaseModel):
    """The target pure state as a unit vector of complex amplitudes."""

    model_config = ConfigDict(frozen=True)

    amplitudes: list[Complex] = Field(
        min_length=2,
        description="Complex amplitudes as [re, im] pairs",
        examples=[[[1.0, 0.0], [0.0, 0.0]]],
    )

    @field_validator("amplitudes")
    @classmethod
    def _check_norm(cls, amplitudes: list[Complex]) -> list[Complex]:
        norm = math.sqrt(sum(re * re + im * im for re, im in amplitudes))
        if abs(norm - 1.0) > TARGET_NORM_TOL:
            raise ValueError(f"target state must have unit norm (got {norm!r})")
        return amplitudes

    @property
    def dim(self) -> int:
        return len(self.amplitudes)

    def to_array(self) -> np.ndarray:
        raw = np.asarray(self.amplitudes, dtype=float)
        return raw[:, 0] + 1j * raw[:, 1]


class OperatorFile(BaseModel):
    """On-disk description of a verification protocol."""

    dimension: int = Field(ge=2, le=4096, description="Hilbert-space dimension", examples=[2])
    target_state: list[Complex] = Field(description="Target amplitudes as [re, im] pairs")
    tests: list[TestSpec] = Field(min_length=1, description="Tests with their probabilities")

    @model_validator(mode="after")
    def _check_dimensions(self) -> "OperatorFile":
        if len(self.target_state) != self.dimension:
            raise ValueError("target_state length does not match dimension")
        for index, test in enumerate(self.tests):
            if test.dim != self.dimension:
                raise ValueError(f"test {index} matrix does not match dimension {self.dimension}")
        return self


class Precision(BaseModel):
    """Target infidelity epsilon and significance level delta."""

    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(gt=0.0, lt=1.0, description="Infidelity budget", examples=[0.01])
    delta: float = Field(gt=0.0, lt=1.0, description="Significance level", examples=[0.01])

    @property
    def fidelity(self) -> float:
        """F = 1 - epsilon."""
        return 1.0 - self.epsilon


class NaPlan(BaseModel):
    """Minimal number of tests for an independent (nonadversarial) source."""

    model_config = ConfigDict(frozen=True)

    n_exact: int = Field(ge=0, description="Minimal N with (1 - nu eps)^N <= delta", examples=[919])
    n_upper: int = Field(ge=0, description="Closed-form upper bound ceil(ln(1/delta) / (nu eps))", examples=[922])

    @model_validator(mode="after")
    def _check_order(self) -> "NaPlan":
        if self.n_exact > self.n_upper:
            raise ValueError("n_exact must not exceed n_upper")
        return self


class FidelityResult(BaseModel):
    """Worst-case conditional fidelity of a homogeneous strategy after N passed tests."""

    model_config = ConfigDict(frozen=True)

    fidelity: float = Field(ge=0.0, le=1.0, description="Minimum fidelity F(N, delta, lambda)", examples=[0.75])
    k_star: int | None = Field(
        default=None,
        ge=0,
        description="Largest k with (N+1-k) lambda^k + k lambda^(k-1) >= (N+1) delta; absent in the zero regime",
        examples=[0],
    )
    zero_regime: bool = Field(description="True iff delta <= lambda^N (lambda > 0)", examples=[False])

    @model_validator(mode="after")
    def _check_regime(self) -> "FidelityResult":
        if self.zero_regime and (self.fidelity != 0.0 or self.k_star is not None):
            raise ValueError("the zero regime carries fidelity 0 and no k_star")
        return self


class HomogeneousPlan(BaseModel):
    """Exact adversarial test count of a homogeneous strategy with its bounds."""

    model_config = ConfigDict(frozen=True)

    n_exact: int = Field(ge=1, description="Minimal N with F(N, delta, lambda) >= 1 - eps", examples=[62])
    k_opt: int = Field(ge=0, description="Largest k with delta <= lambda^k / (F + lambda eps)", examples=[3])
    n_lower: int = Field(description="Closed-form lower bound", examples=[57])
    n_upper: int = Field(description="Closed-form upper bound", examples=[64])
    n_approx: float | None = Field(
        default=None,
        description="High-precision approximation ln(delta) / (lambda eps ln(lambda)); absent for lambda = 0",
        examples=[66.44],
    )
    k_minus: int | None = Field(default=None, description="floor(ln delta / ln lambda)", examples=[3])
    k_plus: int | None = Field(default=None, description="ceil(ln delta / ln lambda)", examples=[4])

    @model_validator(mode="after")
    def _check_sandwich(self) -> "HomogeneousPlan":
        if not self.n_lower <= self.n_exact <= self.n_upper:
            raise ValueError(
                f"bounds do not bracket the exact count: {self.n_lower} <= {self.n_exact} <= {self.n_upper}"
            )
        return self


class GeneralFidelityBound(BaseModel):
    """Universal lower bound 1 - (1 - delta) / (N nu delta) on the fidelity."""

    model_config = ConfigDict(frozen=True)

    bound: float = Field(description="Raw bound; may be negative where it is vacuous", examples=[0.977])
    saturated: bool = Field(description="True iff delta >= (1 + N beta) / (N + 1)", examples=[True])

    @computed_field
    @property
    def clamped(self) -> bool:
        return self.bound < 0.0

    @computed_field
    @property
    def display_bound(self) -> float:
        return max(0.0, self.bound)


class NonsingularSummary(BaseModel):
    """beta, tau, the effective eigenvalue beta_tilde and the cost constant h."""

    model_config = ConfigDict(frozen=True)

    beta: float = Field(gt=0.0, lt=1.0, examples=[0.5])
    tau: float = Field(gt=0.0, lt=1.0, examples=[0.05])
    beta_tilde: float = Field(description="beta if beta ln(1/beta) <= tau ln(1/tau), else tau", examples=[0.05])
    h: float = Field(gt=0.0, description="1 / (beta_tilde ln(1/beta_tilde))", examples=[6.676])

    @model_validator(mode="after")
    def _check_choice(self) -> "NonsingularSummary":
        if self.tau > self.beta:
            raise ValueError("tau must not exceed beta")
        if self.beta_tilde not in (self.beta, self.tau):
            raise ValueError("beta_tilde must be beta or tau")
        return self


class NonsingularPlan(BaseModel):
    """Test-count sandwich for a nonsingular strategy."""

    model_config = ConfigDict(frozen=True)

    k_minus: int = Field(ge=0, description="floor(ln delta / ln beta_tilde)", examples=[3])
    n_lower: int = Field(description="Lower bound on N(eps, delta, Omega)", examples=[57])
    n_upper_strict: float = Field(description="Strict upper bound h ln(1/(F delta)) / eps", examples=[69.4])
    n_approx: float = Field(description="h ln(1/delta) / eps", examples=[66.44])


class FidelityReport(BaseModel):
    """Everything known about F(N, delta, Omega) for one strategy."""

    model_config = ConfigDict(frozen=True)

    n_tests: int = Field(ge=1, examples=[2])
    delta: float = Field(gt=0.0, le=1.0, examples=[0.8])
    exact: FidelityResult | None = Field(default=None, description="Exact value for homogeneous strategies")
    general_bound: GeneralFidelityBound
    nonsingular_bound: float | None = Field(
        default=None,
        description="Bound for nonsingular strategies (absent when tau = 0)",
    )


class HedgeReport(BaseModel):
    """Hedged strategy Omega_p = p + (1 - p) Omega with its test-count guarantees."""

    model_config = ConfigDict(frozen=True)

    p: float = Field(ge=0.0, lt=1.0, description="Probability of the trivial test", examples=[0.3679])
    beta_p: float = Field(description="Second largest eigenvalue of Omega_p", examples=[0.3679])
    tau_p: float = Field(description="Smallest eigenvalue of Omega_p", examples=[0.3679])
    h_value: float = Field(gt=0.0, description="h(p, nu, tau)", examples=[2.718])
    p_star: float = Field(description="p*(nu, tau)", examples=[0.3679])
    p_star_max: float = Field(description="p*(nu) = p*(nu, 0)", examples=[0.3679])
    nu_h: float = Field(description="nu h(nu/e, nu, 0)", examples=[2.718])
    n_bound: float = Field(gt=0.0, description="Strict upper bound on N(eps, delta, Omega_p)", examples=[65.45])
    n_bound_secondary: float = Field(
        gt=0.0,
        description="Looser closed form ln(1/(F delta)) / ((1 - nu + nu^2/e) nu eps)",
        examples=[65.45],
    )
    ratio_bound: float = Field(gt=0.0, description="Upper bound on N(eps, delta, Omega_p) / N_na", examples=[2.995])
    guaranteed: bool = Field(
        description="True when p = nu/e or p*(nu, tau) <= p <= p*(nu), so the nu/e constant applies",
        examples=[True],
    )

    @model_validator(mode="after")
    def _check_constants(self) -> "HedgeReport":
        if self.p_star > self.p_star_max + 1e-12:
            raise ValueError("p*(nu, tau) must not exceed p*(nu)")
        if not 1.0 < self.nu_h <= math.e + 1e-12:
            raise ValueError(f"nu h(nu/e, nu, 0) must lie in (1, e], got {self.nu_h!r}")
        return self


class HedgeConstants(BaseModel):
    """Optimal hedging probabilities and cost constants of one (nu, tau) pair."""

    model_config = ConfigDict(frozen=True)

    nu: float = Field(gt=0.0, le=1.0, examples=[1.0])
    tau: float = Field(ge=0.0, lt=1.0, examples=[0.0])
    p_star: float = Field(description="p*(nu, tau)", examples=[0.3679])
    p_star_max: float = Field(description="p*(nu) = p*(nu, 0)", examples=[0.3679])
    p_nu_over_e: float = Field(description="The tau-free choice nu/e", examples=[0.3679])
    h_at_p_star: float = Field(description="h(p*(nu, tau), nu, tau)", examples=[2.718])
    h_at_nu_over_e: float = Field(description="h(nu/e, nu, tau)", examples=[2.718])
    h_star: float = Field(description="h(nu/e, nu, 0)", examples=[2.718])
    nu_h: float = Field(description="nu h(nu/e, nu, 0)", examples=[2.718])


class AdversaryConfiguration(BaseModel):
    """Permutation-symmetrized product of eigenvectors over N + 1 copies."""

    model_config = ConfigDict(frozen=True)

    counts: list[int] = Field(
        min_length=1,
        description="Copies assigned to each distinct eigenvalue; counts[0] is the target",
        examples=[[2, 1]],
    )
    pass_prob: float = Field(ge=0.0, le=1.0, description="Probability of passing all N tests", examples=[0.667])
    fid_prob: float = Field(
        ge=0.0,
        le=1.0,
        description="Probability of passing and leaving the target untested",
        examples=[0.5],
    )

    @field_validator("counts")
    @classmethod
    def _check_counts(cls, counts: list[int]) -> list[int]:
        if any(count < 0 for count in counts):
            raise ValueError("counts must be non-negative")
        return counts

    @model_validator(mode="after")
    def _check_order(self) -> "AdversaryConfiguration":
        if self.fid_prob > self.pass_prob * (1.0 + 1e-12):
            raise ValueError("fid_prob must not exceed pass_prob")
        return self


class MixtureComponent(BaseModel):
    """A configuration with its mixture weight."""

    model_config = ConfigDict(frozen=True)

    configuration: AdversaryConfiguration
    weight: float = Field(ge=0.0, le=1.0, examples=[0.45])


class OracleResult(BaseModel):
    """Minimum conditional fidelity over the restricted adversary family."""

    model_config = ConfigDict(frozen=True)

    min_fidelity: float = Field(ge=0.0, le=1.0, examples=[0.9])
    support: list[MixtureComponent] = Field(min_length=1, max_length=2)
    achieved_pass_prob: float = Field(description="Pass probability of the optimal mixture", examples=[0.5])
    delta: float = Field(gt=0.0, le=1.0, examples=[0.5])

    @model_validator(mode="after")
    def _check_support(self) -> "OracleResult":
        total = sum(component.weight for component in self.support)
        if abs(total - 1.0) > 1e-12:
            raise ValueError("support weights must sum to 1")
        if self.achieved_pass_prob < self.delta - 1e-12:
            raise ValueError("the optimal mixture must pass with probability at least delta")
        return self


class SimConfig(BaseModel):
    """Monte Carlo run description."""

    model_config = ConfigDict(frozen=True)

    mode: Literal["iid", "adversary"]
    per_copy_infidelities: list[float] | None = Field(
        default=None,
        description="Infidelity of each tested copy (iid mode)",
        examples=[[0.1, 0.1]],
    )
    mixture: list[MixtureComponent] | None = Field(
        default=None,
        description="Weighted adversary configurations (adversary mode)",
    )
    n_tests: int = Field(ge=1, examples=[10])
    trials: int = Field(ge=1, examples=[1_000_000])
    seed: int = Field(default=0, ge=0, le=UINT64_MAX, examples=[12345])

    @field_validator("per_copy_infidelities")
    @classmethod
    def _check_infidelities(cls, values: list[float] | None) -> list[float] | None:
        if values is not None and any(not 0.0 <= value <= 1.0 for value in values):
            raise ValueError("per-copy infidelities must lie in [0, 1]")
        return values

    @model_validator(mode="after")
    def _check_mode(self) -> "SimConfig":
        if self.mode == "iid":
            if self.per_copy_infidelities is None or len(self.per_copy_infidelities) != self.n_tests:
                raise ValueError("iid mode needs one infidelity per test")
        else:
            if not self.mixture:
                raise ValueError("adversary mode needs a mixture")
            total = sum(component.weight for component in self.mixture)
            if abs(total - 1.0) > PROBABILITY_SUM_TOL:
                raise ValueError("mixture weights must sum to 1")
            for component in self.mixture:
                if sum(component.configuration.counts) != self.n_tests + 1:
                    raise ValueError("each configuration must place N + 1 copies")
        return self


class SimReport(BaseModel):
    """Outcome of a Monte Carlo run against its closed-form prediction."""

    model_config = ConfigDict(frozen=True)

    trials: int = Field(ge=1, examples=[1_000_000])
    acceptances: int = Field(ge=0, examples=[598_700])
    empirical_rate: float = Field(ge=0.0, le=1.0, examples=[0.5987])
    predicted_rate: float = Field(ge=0.0, le=1.0, examples=[0.598737])
    z_score: float | None = Field(
        default=None,
        description="(empirical - predicted) / binomial sigma; absent when predicted is 0 or 1",
        examples=[-0.08],
    )
    conditional_fidelity_estimate: float | None = Field(
        default=None,
        description="Fraction of accepted trials whose untested copy was the target (adversary mode)",
        examples=[0.9],
    )
    predicted_conditional_fidelity: float | None = Field(
        default=None,
        description="Closed-form f / p of the simulated mixture (adversary mode)",
        examples=[0.9],
    )


class SweepGrid(BaseModel):
    """Parameter grid for the figure sweeps."""

    model_config = ConfigDict(frozen=True)

    figure: Literal[1, 2]
    lambdas: list[float] = Field(default_factory=list, description="Homogeneous lambdas (figure 1)")
    nus: list[float] = Field(default_factory=list, description="Spectral gaps (figure 2)")
    epsilons: list[float] = Field(min_length=1)
    deltas: list[float] = Field(min_length=1)
    paired: bool = Field(
        default=False,
        description="Zip epsilons with deltas instead of taking their product",
    )

    @model_validator(mode="after")
    def _check_grid(self) -> "SweepGrid":
        strategy_values = self.lambdas if self.figure == 1 else self.nus
        if not strategy_values:
            raise ValueError(f"figure {self.figure} needs {'lambdas' if self.figure == 1 else 'nus'}")
        if any(not 0.0 < value < 1.0 for value in self.lambdas):
            raise ValueError("lambdas must lie in (0, 1)")
        # nu = 1 is the projector strategy and is a valid figure-2 curve
        if any(not 0.0 < value <= 1.0 for value in self.nus):
            raise ValueError("nus must lie in (0, 1]")
        if any(not 0.0 < value < 1.0 for value in [*self.epsilons, *self.deltas]):
            raise ValueError("epsilons and deltas must lie in (0, 1)")
        if self.paired and len(self.epsilons) != len(self.deltas):
            raise ValueError("paired grids need as many epsilons as deltas")
        return self

    def precisions(self) -> list[tuple[float, float]]:
        if self.paired:
            return list(zip(self.epsilons, self.deltas))
        return [(epsilon, delta) for epsilon in self.epsilons for delta in self.deltas]


class HedgeSweepGrid(BaseModel):
    """Exact hedged test counts of a homogeneous strategy across trivial-test probabilities."""

    model_config = ConfigDict(frozen=True)

    lambdas: list[float] = Field(min_length=1)
    epsilons: list[float] = Field(min_length=1)
    deltas: list[float] = Field(min_length=1)
    ps: list[float] = Field(min_length=1, description="Trivial-test probabilities in [0, 1)")

    @model_validator(mode="after")
    def _check_grid(self) -> "HedgeSweepGrid":
        if any(not 0.0 <= value < 1.0 for value in [*self.lambdas, *self.ps]):
            raise ValueError("lambdas and ps must lie in [0, 1)")
        if any(not 0.0 < value < 1.0 for value in [*self.epsilons, *self.deltas]):
            raise ValueError("epsilons and deltas must lie in (0, 1)")
        return self


Scenario = Literal["nonadversarial", "adversarial"]
PlanMethod = Literal[
    "nonadversarial-exact",
    "adversarial-exact",
    "adversarial-singular",
    "adversarial-bound",
    "adversarial-general-bound",
]


class PlanResult(BaseModel):
    """A test budget with the method that produced it."""

    model_config = ConfigDict(frozen=True)

    scenario: Scenario
    method: PlanMethod = Field(description="Exact formula or bound the budget comes from")
    n_tests: int = Field(ge=1, description="Recommended number of tests", examples=[62])
    n_lower: int | None = Field(default=None, description="Proven lower bound, when known")
    n_upper: int | None = Field(default=None, description="Closed-form upper bound, when known")
    n_approx: float | None = Field(default=None, description="High-precision approximation")
    k_opt: int | None = Field(default=None, description="Optimal k of the exact homogeneous count")
    k_minus: int | None = Field(default=None)
    k_plus: int | None = Field(default=None)
    precision: Precision
    summary: StrategySummary = Field(description="Summary of the strategy actually planned (hedged if hedging)")
    hedge: HedgeReport | None = Field(default=None)


class CliInvocation(BaseModel):
    """A parsed command line."""

    model_config = ConfigDict(frozen=True)

    command: Literal["plan", "fidelity", "hedge", "oracle", "simulate", "sweep", "spectrum"]
    flags: dict[str, object] = Field(default_factory=dict)
    output_format: Literal["json", "text"] = "json"
