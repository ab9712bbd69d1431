"""Command-line interface: plan, fidelity, hedge, oracle, simulate, sweep and spectrum."""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Sequence

from pydantic import BaseModel, ValidationError

from qsvplan.config import Settings
from qsvplan.core.general import fidelity_report
from qsvplan.core.hedging import hedge_constants, hedged_plan
from qsvplan.core.montecarlo import simulate_adversary, simulate_iid
from qsvplan.core.oracle import min_fidelity_lp
from qsvplan.core.planner import parse_hedge, plan
from qsvplan.core.strategy import homogeneous_spectrum, parse_spectrum, spectrum_from_file, summarize
from qsvplan.core.sweep import (
    HEDGE_COLUMNS,
    NUM_TESTS_COLUMNS,
    OVERHEAD_COLUMNS,
    default_grid,
    sweep_hedging,
    sweep_num_tests,
    sweep_overhead,
    write_csv,
)
from qsvplan.errors import GuardError, InfeasibleError, QsvError, StrategyError
from qsvplan.logger import get_logger, setup_logging
from qsvplan.models import (
    CliInvocation,
    EigenSpectrum,
    HedgeSweepGrid,
    Precision,
    SimConfig,
    SpectrumEntry,
    SweepGrid,
)

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3

STRATEGY_FLAGS = ("lam", "beta", "tau", "spectrum", "operator", "dim")


def _float_list(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def _strategy_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("strategy (exactly one source)")
    group.add_argument("--lambda", dest="lam", type=float, help="homogeneous strategy with this lambda")
    group.add_argument("--dim", type=int, default=2, help="Hilbert-space dimension for --lambda (default: 2)")
    group.add_argument("--beta", type=float, help="second largest eigenvalue")
    group.add_argument("--tau", type=float, help="smallest eigenvalue (default: equal to --beta, i.e. homogeneous)")
    group.add_argument("--spectrum", help='eigenvalue profile such as "1:1,0.5:3,0.1:2"')
    group.add_argument("--operator", help="operator JSON file (tests and target state)")
    return parent


def _format_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--format", dest="output_format", choices=["json", "text"], default="json")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsvplan",
        description="Plan and verify the number of tests needed for quantum state verification.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    strategy = _strategy_parent()
    output = _format_parent()

    p = commands.add_parser("plan", parents=[strategy, output], help="minimal number of tests")
    p.add_argument("--scenario", choices=["nonadversarial", "adversarial"], required=True)
    p.add_argument("--epsilon", type=float, required=True, help="infidelity budget, e.g. 1e-3")
    p.add_argument("--delta", type=float, required=True, help="significance level, e.g. 1e-9")
    p.add_argument("--hedge", default="none", help="none, auto (p = nu/e) or p=V")

    p = commands.add_parser("fidelity", parents=[strategy, output], help="worst-case fidelity after N tests")
    p.add_argument("--n", dest="n_tests", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)

    p = commands.add_parser("hedge", parents=[output], help="optimal trivial-test probabilities")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--epsilon", type=float, help="with --delta, also report test-count guarantees")
    p.add_argument("--delta", type=float)
    p.add_argument("--p", dest="p_choice", default="auto", help="auto (nu/e) or an explicit probability")

    p = commands.add_parser("oracle", parents=[strategy, output], help="brute-force worst-case adversary")
    p.add_argument("--n", dest="n_tests", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)

    p = commands.add_parser("simulate", parents=[strategy, output], help="Monte Carlo validation")
    p.add_argument("--mode", choices=["iid", "adversary"], required=True)
    p.add_argument("--n", dest="n_tests", type=int, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--infidelity", type=float, help="per-copy infidelity for every copy (iid)")
    p.add_argument("--infidelities", type=_float_list, help="comma-separated per-copy infidelities (iid)")
    p.add_argument("--delta", type=float, help="pass-probability floor of the simulated worst-case adversary")

    p = commands.add_parser("sweep", parents=[output], help="write figure data as CSV")
    p.add_argument("--figure", choices=["1", "2", "hedge"], required=True)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--lambdas", type=_float_list)
    p.add_argument("--nus", type=_float_list)
    p.add_argument("--epsilons", type=_float_list)
    p.add_argument("--deltas", type=_float_list)
    p.add_argument("--ps", type=_float_list, help="trivial-test probabilities (figure hedge)")
    p.add_argument("--paired", action="store_true", help="zip epsilons with deltas")

    p = commands.add_parser("spectrum", parents=[output], help="eigenvalue profile of an operator")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--operator")
    source.add_argument("--spectrum")
    return parser


def resolve_spectrum(flags: dict[str, object]) -> EigenSpectrum:
    """Build the strategy spectrum from exactly one strategy source."""
    sources = [
        name
        for name, present in (
            ("--lambda", flags.get("lam") is not None),
            ("--beta/--tau", flags.get("beta") is not None or flags.get("tau") is not None),
            ("--spectrum", flags.get("spectrum") is not None),
            ("--operator", flags.get("operator") is not None),
        )
        if present
    ]
    if len(sources) != 1:
        found = ", ".join(sources) or "none"
        raise StrategyError(f"exactly one strategy source is required (found: {found})")
    if flags.get("lam") is not None:
        return homogeneous_spectrum(float(flags["lam"]), int(flags.get("dim") or 2))
    if flags.get("spectrum") is not None:
        return parse_spectrum(str(flags["spectrum"]))
    if flags.get("operator") is not None:
        return spectrum_from_file(str(flags["operator"]))
    if flags.get("beta") is None:
        raise StrategyError("--tau needs --beta")
    beta = float(flags["beta"])
    tau = beta if flags.get("tau") is None else float(flags["tau"])
    if tau > beta:
        raise StrategyError(f"--tau ({tau!r}) must not exceed --beta ({beta!r})")
    entries = [SpectrumEntry(value=1.0, multiplicity=1), SpectrumEntry(value=beta, multiplicity=1)]
    if tau < beta:
        entries.append(SpectrumEntry(value=tau, multiplicity=1))
    return EigenSpectrum(entries=entries)


def _precision(flags: dict[str, object]) -> Precision:
    return Precision(epsilon=flags["epsilon"], delta=flags["delta"])


def _cmd_plan(flags: dict[str, object]) -> BaseModel:
    summary = summarize(resolve_spectrum(flags))
    return plan(summary, _precision(flags), flags["scenario"], parse_hedge(str(flags["hedge"])))


def _cmd_fidelity(flags: dict[str, object]) -> BaseModel:
    delta = float(flags["delta"])
    if not 0.0 < delta <= 1.0 or int(flags["n_tests"]) < 1:
        raise StrategyError("fidelity needs N >= 1 and 0 < delta <= 1")
    return fidelity_report(resolve_spectrum(flags), int(flags["n_tests"]), delta)


def _cmd_hedge(flags: dict[str, object]) -> BaseModel:
    nu, tau = float(flags["nu"]), float(flags["tau"])
    # tau <= 1 - nu is checked by the hedging code, which tolerates rounding in 1 - nu
    if not 0.0 < nu <= 1.0 or tau < 0.0:
        raise StrategyError("hedge needs 0 < nu <= 1 and 0 <= tau <= 1 - nu")
    if flags.get("epsilon") is None and flags.get("delta") is None:
        return hedge_constants(nu, tau)
    choice = str(flags["p_choice"])
    return hedged_plan(_precision(flags), nu, tau, choice if choice == "auto" else float(choice))


def _cmd_oracle(flags: dict[str, object]) -> BaseModel:
    return min_fidelity_lp(resolve_spectrum(flags), int(flags["n_tests"]), float(flags["delta"]))


def _cmd_simulate(flags: dict[str, object]) -> BaseModel:
    spectrum = resolve_spectrum(flags)
    n_tests = int(flags["n_tests"])
    trials, seed = int(flags["trials"]), int(flags["seed"])
    if flags["mode"] == "iid":
        infidelities = flags.get("infidelities")
        if infidelities is None:
            if flags.get("infidelity") is None:
                raise StrategyError("iid mode needs --infidelity or --infidelities")
            infidelities = [float(flags["infidelity"])] * n_tests
        config = SimConfig(
            mode="iid",
            per_copy_infidelities=infidelities,
            n_tests=n_tests,
            trials=trials,
            seed=seed,
        )
        return simulate_iid(summarize(spectrum), config)
    if flags.get("delta") is None:
        raise StrategyError("adversary mode needs --delta")
    worst = min_fidelity_lp(spectrum, n_tests, float(flags["delta"]))
    return simulate_adversary(spectrum, worst.support, n_tests, trials, seed)


def _cmd_sweep(flags: dict[str, object]) -> dict[str, object]:
    figure = flags["figure"]
    overrides = {
        key: flags[key] for key in ("lambdas", "nus", "epsilons", "deltas") if flags.get(key) is not None
    }
    if figure == "hedge":
        grid = HedgeSweepGrid(
            lambdas=overrides.get("lambdas", [0.0, 0.5]),
            epsilons=overrides.get("epsilons", [0.1, 0.01]),
            deltas=overrides.get("deltas", [0.1, 0.01]),
            ps=flags.get("ps") or [0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
        )
        rows, columns = sweep_hedging(grid), HEDGE_COLUMNS
    else:
        number = int(figure)
        base = default_grid(number).model_dump()
        base.update(overrides)
        if flags.get("paired"):
            base["paired"] = True
        elif "epsilons" in overrides or "deltas" in overrides:
            base["paired"] = False
        grid = SweepGrid.model_validate(base)
        if number == 1:
            rows, columns = sweep_num_tests(grid), NUM_TESTS_COLUMNS
        else:
            rows, columns = sweep_overhead(grid), OVERHEAD_COLUMNS
    path = write_csv(rows, columns, str(flags["out"]))
    return {"figure": figure, "rows": len(rows), "columns": list(columns), "path": str(path)}


def _cmd_spectrum(flags: dict[str, object]) -> dict[str, object]:
    if flags.get("operator") is not None:
        spectrum = spectrum_from_file(str(flags["operator"]))
    else:
        spectrum = parse_spectrum(str(flags["spectrum"]))
    return {
        "spectrum": spectrum.model_dump(),
        "summary": summarize(spectrum).model_dump(by_alias=True),
    }


COMMANDS = {
    "plan": _cmd_plan,
    "fidelity": _cmd_fidelity,
    "hedge": _cmd_hedge,
    "oracle": _cmd_oracle,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "spectrum": _cmd_spectrum,
}


def _flatten(data: object, prefix: str = "") -> list[str]:
    if isinstance(data, dict):
        lines = []
        for key, value in data.items():
            lines += _flatten(value, f"{prefix}{key}.")
        return lines
    if isinstance(data, list):
        lines = []
        for index, value in enumerate(data):
            lines += _flatten(value, f"{prefix}{index}.")
        return lines
    return [f"{prefix.rstrip('.')}: {json.dumps(data)}"]


def render(result: BaseModel | dict[str, object], output_format: str) -> str:
    data = result.model_dump(mode="json", by_alias=True) if isinstance(result, BaseModel) else result
    if output_format == "text":
        return "\n".join(_flatten(data))
    return json.dumps(data, indent=2)


def run(invocation: CliInvocation, out=None, err=None) -> int:
    """Dispatch one invocation; returns the process exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    logger.debug("run(): command=%s flags=%r", invocation.command, invocation.flags)
    try:
        result = COMMANDS[invocation.command](dict(invocation.flags))
    except (GuardError, InfeasibleError) as exc:
        print(f"qsvplan {invocation.command}: {exc}", file=err)
        return EXIT_INFEASIBLE
    except (QsvError, ValueError) as exc:
        print(f"qsvplan {invocation.command}: {exc}", file=err)
        return EXIT_VALIDATION
    print(render(result, invocation.output_format), file=out)
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    try:
        settings = Settings.from_env()
    except ValidationError as exc:
        print(f"qsvplan: invalid environment: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    setup_logging(log_level=settings.log_level, log_file=settings.log_file)
    args = vars(build_parser().parse_args(argv))
    invocation = CliInvocation(
        command=args.pop("command"),
        output_format=args.pop("output_format"),
        flags=args,
    )
    return run(invocation)


if __name__ == "__main__":
    sys.exit(main())
