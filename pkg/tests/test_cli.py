import json

import pytest

from qsvplan.cli import main, resolve_spectrum


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("QSV_THREADS", "QSV_LOG_LEVEL", "QSV_LOG_FILE"):
        monkeypatch.delenv(name, raising=False)


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---- plan ----
def test_plan_adversarial_homogeneous(capsys):
    code, out, _ = _run(capsys, "plan", "--scenario", "adversarial", "--epsilon", "0.1", "--delta", "0.1", "--lambda", "0.5")
    assert code == 0
    result = json.loads(out)
    assert result["n_tests"] == 62
    assert result["method"] == "adversarial-exact"
    assert result["summary"]["lambda"] == 0.5


def test_plan_nonadversarial(capsys):
    code, out, _ = _run(capsys, "plan", "--scenario", "nonadversarial", "--epsilon", "0.01", "--delta", "0.01", "--beta", "0.5")
    assert code == 0
    result = json.loads(out)
    assert result["n_tests"] == 919
    assert result["n_upper"] == 922


def test_plan_accepts_scientific_notation(capsys):
    code, out, _ = _run(capsys, "plan", "--scenario", "adversarial", "--epsilon", "1e-3", "--delta", "1e-9", "--lambda", "0.3679")
    assert code == 0
    assert json.loads(out)["n_tests"] > 0


def test_auto_hedge_repairs_a_singular_spectrum(capsys):
    code, out, err = _run(
        capsys, "plan", "--scenario", "adversarial", "--epsilon", "0.01", "--delta", "0.01",
        "--spectrum", "1:1,0.5:2,0:1", "--hedge", "auto",
    )
    assert code == 0, err
    result = json.loads(out)
    assert result["method"] == "adversarial-bound"
    assert result["hedge"]["guaranteed"] is True
    assert result["summary"]["tau"] > 0.0


def test_hedging_the_nonadversarial_scenario_is_rejected(capsys):
    code, _, err = _run(
        capsys, "plan", "--scenario", "nonadversarial", "--epsilon", "0.1", "--delta", "0.1",
        "--lambda", "0.5", "--hedge", "auto",
    )
    assert code == 2
    assert "adversarial" in err


def test_text_output_lists_one_field_per_line(capsys):
    code, out, _ = _run(
        capsys, "plan", "--scenario", "adversarial", "--epsilon", "0.1", "--delta", "0.1",
        "--lambda", "0.5", "--format", "text",
    )
    assert code == 0
    assert "n_tests: 62" in out.splitlines()
    assert "precision.epsilon: 0.1" in out.splitlines()


def test_json_floats_round_trip(capsys):
    _, out, _ = _run(capsys, "plan", "--scenario", "adversarial", "--epsilon", "0.1", "--delta", "0.1", "--lambda", "0.5")
    n_approx = json.loads(out)["n_approx"]
    assert repr(n_approx) in out


# ---- other commands ----
def test_fidelity(capsys):
    code, out, _ = _run(capsys, "fidelity", "--n", "2", "--delta", "0.8", "--lambda", "0.5")
    assert code == 0
    result = json.loads(out)
    assert result["exact"]["fidelity"] == pytest.approx(0.75)
    assert result["exact"]["k_star"] == 0


def test_hedge_constants(capsys):
    code, out, _ = _run(capsys, "hedge", "--nu", "1", "--tau", "0")
    assert code == 0
    result = json.loads(out)
    assert result["p_star"] == pytest.approx(0.36787944, abs=1e-8)
    assert result["nu_h"] == pytest.approx(2.718281828, abs=1e-8)


def test_hedge_with_precision(capsys):
    code, out, _ = _run(capsys, "hedge", "--nu", "1", "--tau", "0", "--epsilon", "0.1", "--delta", "0.1")
    assert code == 0
    assert json.loads(out)["ratio_bound"] == pytest.approx(2.995, abs=1e-3)


@pytest.mark.parametrize("strategy", [("--lambda", "0.1"), ("--spectrum", "1:1,0.2:3"), ("--beta", "0.3")])
def test_auto_hedge_of_a_decimal_homogeneous_strategy(capsys, strategy):
    code, out, err = _run(
        capsys, "plan", "--scenario", "adversarial", "--epsilon", "0.01", "--delta", "0.01", *strategy, "--hedge", "auto",
    )
    assert code == 0, err
    assert json.loads(out)["hedge"]["guaranteed"] is True


def test_hedge_accepts_tau_equal_to_one_minus_nu(capsys):
    code, out, err = _run(capsys, "hedge", "--nu", "0.8", "--tau", "0.2")
    assert code == 0, err
    assert json.loads(out)["p_star"] == pytest.approx(0.20985, abs=1e-4)


def test_hedge_rejects_tau_above_one_minus_nu(capsys):
    code, _, _ = _run(capsys, "hedge", "--nu", "0.8", "--tau", "0.3")
    assert code == 2


def test_oracle(capsys):
    code, out, _ = _run(capsys, "oracle", "--n", "10", "--delta", "0.5", "--lambda", "0")
    assert code == 0
    assert json.loads(out)["min_fidelity"] == pytest.approx(0.9)


def test_simulate_iid(capsys):
    code, out, _ = _run(
        capsys, "simulate", "--mode", "iid", "--n", "10", "--trials", "20000", "--seed", "1",
        "--infidelity", "0.1", "--lambda", "0.5",
    )
    assert code == 0
    result = json.loads(out)
    assert result["trials"] == 20000
    assert result["predicted_rate"] == pytest.approx(0.95**10)


def test_simulate_adversary(capsys):
    code, out, _ = _run(
        capsys, "simulate", "--mode", "adversary", "--n", "2", "--trials", "20000",
        "--delta", "0.8", "--lambda", "0.5",
    )
    assert code == 0
    assert json.loads(out)["predicted_conditional_fidelity"] == pytest.approx(0.75)


def test_sweep_writes_csv(tmp_path, capsys):
    target = tmp_path / "figure1.csv"
    code, out, _ = _run(
        capsys, "sweep", "--figure", "1", "--out", str(target),
        "--lambdas", "0.5", "--epsilons", "0.1", "--deltas", "0.1",
    )
    assert code == 0
    assert json.loads(out)["rows"] == 1
    lines = target.read_text(encoding="utf-8").splitlines()
    assert lines[1].split(",")[3] == "62"


def test_sweep_hedge_figure(tmp_path, capsys):
    target = tmp_path / "hedge.csv"
    code, _, _ = _run(capsys, "sweep", "--figure", "hedge", "--out", str(target), "--lambdas", "0.5", "--ps", "0,0.2")
    assert code == 0
    assert len(target.read_text(encoding="utf-8").splitlines()) == 1 + 2 * 2 * 2


def test_spectrum_of_an_operator_file(tmp_path, capsys):
    path = tmp_path / "operator.json"
    path.write_text(
        json.dumps(
            {
                "dimension": 2,
                "target_state": [[1.0, 0.0], [0.0, 0.0]],
                "tests": [{"probability": 1.0, "matrix": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]}],
            }
        ),
        encoding="utf-8",
    )
    code, out, _ = _run(capsys, "spectrum", "--operator", str(path))
    assert code == 0
    result = json.loads(out)
    assert result["spectrum"]["entries"] == [{"value": 1.0, "multiplicity": 1}, {"value": 0.0, "multiplicity": 1}]
    assert result["summary"]["beta"] == 0.0


# ---- errors and exit codes ----
def test_conflicting_strategy_sources(capsys):
    code, _, err = _run(capsys, "fidelity", "--n", "2", "--delta", "0.8", "--lambda", "0.5", "--beta", "0.5")
    assert code == 2
    assert "exactly one strategy source" in err


def test_missing_strategy_source(capsys):
    code, _, _ = _run(capsys, "fidelity", "--n", "2", "--delta", "0.8")
    assert code == 2


def test_unknown_flag_names_the_flag(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["plan", "--scenario", "adversarial", "--epsilon", "0.1", "--delta", "0.1", "--lambda", "0.5", "--bogus"])
    assert excinfo.value.code == 2
    assert "--bogus" in capsys.readouterr().err


def test_out_of_range_precision_is_a_validation_error(capsys):
    code, _, _ = _run(capsys, "plan", "--scenario", "adversarial", "--epsilon", "1.5", "--delta", "0.1", "--lambda", "0.5")
    assert code == 2


def test_guard_violation_exits_with_three(capsys):
    code, _, err = _run(capsys, "oracle", "--n", "31", "--delta", "0.5", "--lambda", "0.5")
    assert code == 3
    assert "N = 31" in err


def test_infeasible_oracle_exits_with_three(capsys):
    code, _, _ = _run(capsys, "oracle", "--n", "3", "--delta", "1.5", "--lambda", "0.5")
    assert code == 3


def test_invalid_environment_is_a_validation_error(monkeypatch, capsys):
    monkeypatch.setenv("QSV_THREADS", "-2")
    code, _, err = _run(capsys, "hedge", "--nu", "1", "--tau", "0")
    assert code == 2
    assert "environment" in err


def test_resolve_spectrum_defaults_tau_to_beta():
    spectrum = resolve_spectrum({"beta": 0.4})
    assert [entry.value for entry in spectrum.entries] == [1.0, 0.4]
    spectrum = resolve_spectrum({"beta": 0.4, "tau": 0.1})
    assert [entry.value for entry in spectrum.entries] == [1.0, 0.4, 0.1]
