from __future__ import annotations

from typing import Literal

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, ValidationError

from qsvplan.config import Settings
from qsvplan.core import planner
from qsvplan.core.general import fidelity_report
from qsvplan.core.hedging import hedge_constants, hedged_plan
from qsvplan.core.montecarlo import simulate_adversary
from qsvplan.core.oracle import min_fidelity_lp
from qsvplan.core.strategy import (
    build_verification_operator,
    parse_spectrum,
    spectrum_from_operator,
    summarize,
)
from qsvplan.errors import GuardError, InfeasibleError, StrategyError
from qsvplan.logger import setup_logging
from qsvplan.models import (
    EigenSpectrum,
    FidelityReport,
    HedgeConstants,
    HedgeReport,
    OperatorFile,
    OracleResult,
    PlanResult,
    Precision,
    Scenario,
    SimReport,
    StrategySummary,
    TargetState,
)

# ---- setup logging ----
settings = Settings.from_env()
logger = setup_logging(log_level=settings.log_level, log_file=settings.log_file)
logger.debug("qsvplan.api.main: starting the API")

# ---- instantiate the FastAPI as the app ----
app = FastAPI(title="Quantum State Verification Planner")


# ---- error responses ----
@app.exception_handler(StrategyError)
@app.exception_handler(ValidationError)
async def invalid_input(request: Request, exc: Exception) -> JSONResponse:
    logger.error("%s %s rejected: %s", request.method, request.url.path, exc)
    return JSONResponse(status_code=422, content={"status": "error", "error": str(exc)})


@app.exception_handler(GuardError)
@app.exception_handler(InfeasibleError)
async def infeasible(request: Request, exc: Exception) -> JSONResponse:
    logger.error("%s %s infeasible: %s", request.method, request.url.path, exc)
    return JSONResponse(status_code=409, content={"status": "error", "error": str(exc)})


# ---- request models ----
class StrategyParams(BaseModel):
    """A strategy given either as a spectrum string or as explicit spectrum entries."""

    spectrum: str | None = Field(
        default=None,
        description='Eigenvalue profile such as "1:1,0.5:3,0.1:2"',
        examples=["1:1,0.5:1"],
    )
    entries: EigenSpectrum | None = Field(default=None, description="Structured spectrum")

    def resolve(self) -> EigenSpectrum:
        if (self.spectrum is None) == (self.entries is None):
            raise StrategyError("give exactly one of spectrum or entries")
        return self.entries if self.entries is not None else parse_spectrum(self.spectrum)


class PlanParams(StrategyParams):
    scenario: Scenario = Field(examples=["adversarial"])
    epsilon: float = Field(examples=[0.1])
    delta: float = Field(examples=[0.1])
    hedge: str = Field(default="none", description="none, auto or p=V", examples=["auto"])


class FidelityParams(StrategyParams):
    n_tests: int = Field(ge=1, examples=[2])
    delta: float = Field(gt=0.0, le=1.0, examples=[0.8])


class HedgeParams(BaseModel):
    nu: float = Field(gt=0.0, le=1.0, examples=[1.0])
    tau: float = Field(ge=0.0, lt=1.0, examples=[0.0])
    epsilon: float | None = Field(default=None, examples=[0.1])
    delta: float | None = Field(default=None, examples=[0.1])
    p: float | Literal["auto"] = Field(default="auto", examples=["auto", 0.2])


class OracleParams(StrategyParams):
    n_tests: int = Field(ge=1, examples=[10])
    delta: float = Field(gt=0.0, le=1.0, examples=[0.5])


class SimulateParams(OracleParams):
    trials: int = Field(default=100_000, ge=1, le=10_000_000)
    seed: int = Field(default=0, ge=0)


# ---- root endpoint ----
@app.get("/", summary="API root", tags=["General"])
async def root():
    """Returns a message identifying the API service."""
    return {"message": "Quantum State Verification Planner"}


# ---- health check endpoint ----
@app.get("/healthz", summary="Health check endpoint", tags=["General"])
async def health():
    return {"status": "healthy"}


# ---- planning ----
@app.post("/plan", response_model=PlanResult, summary="Minimal number of tests", tags=["Planning"])
def plan_tests(params: PlanParams) -> PlanResult:
    """Plan the number of tests for the given strategy, precision and scenario.

    **Example Request:**
    ```json
    {"spectrum": "1:1,0.5:1", "scenario": "adversarial", "epsilon": 0.1, "delta": 0.1}
    ```
    """
    logger.debug("plan_tests(): %r", params)
    summary: StrategySummary = summarize(params.resolve())
    precision = Precision(epsilon=params.epsilon, delta=params.delta)
    return planner.plan(summary, precision, params.scenario, planner.parse_hedge(params.hedge))


@app.post("/fidelity", response_model=FidelityReport, summary="Worst-case fidelity after N tests", tags=["Planning"])
def fidelity(params: FidelityParams) -> FidelityReport:
    return fidelity_report(params.resolve(), params.n_tests, params.delta)


@app.post("/hedge", summary="Optimal trivial-test probability", tags=["Planning"])
def hedge(params: HedgeParams) -> HedgeReport | HedgeConstants:
    if params.epsilon is None or params.delta is None:
        return hedge_constants(params.nu, params.tau)
    return hedged_plan(Precision(epsilon=params.epsilon, delta=params.delta), params.nu, params.tau, params.p)


# ---- validation ----
@app.post("/oracle", response_model=OracleResult, summary="Brute-force worst-case adversary", tags=["Validation"])
def oracle(params: OracleParams) -> OracleResult:
    return min_fidelity_lp(params.resolve(), params.n_tests, params.delta)


@app.post("/simulate", response_model=SimReport, summary="Simulate the worst-case adversary", tags=["Validation"])
def simulate(params: SimulateParams) -> SimReport:
    spectrum = params.resolve()
    worst = min_fidelity_lp(spectrum, params.n_tests, params.delta)
    return simulate_adversary(spectrum, worst.support, params.n_tests, params.trials, params.seed)


# ---- operator ingestion ----
@app.post("/spectrum", response_model=EigenSpectrum, summary="Spectrum of a verification operator", tags=["Strategy"])
def spectrum(document: OperatorFile) -> EigenSpectrum:
    target = TargetState(amplitudes=document.target_state)
    omega = build_verification_operator(document.tests, target)
    return spectrum_from_operator(omega, target)
