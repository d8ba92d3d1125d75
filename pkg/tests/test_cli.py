import json
from pathlib import Path
from typing import Iterator
from unittest.mock import MagicMock, patch

import numpy as np
import pytest

from app.core.config import settings
from app.main import main
from app.models.principle import StdDevPrinciple
from app.services import verification
from app.services.run_log import RunLogService


def _write(tmp_path: Path, text: str) -> str:
    path = tmp_path / "run.cfg"
    path.write_text(text, encoding="utf-8")
    return str(path)


def _negative_loading(rng: np.random.Generator, space) -> StdDevPrinciple:
    principle = object.__new__(StdDevPrinciple)
    object.__setattr__(principle, "beta", -1.0)
    return principle


@pytest.fixture(autouse=True)
def ledger(tmp_path: Path) -> Iterator[RunLogService]:
    service = RunLogService(str(tmp_path / "logs" / "runs.jsonl"))
    with patch("app.main.run_log_service", service):
        yield service


def _events(service: RunLogService) -> list[dict]:
    with open(service.file_path, encoding="utf-8") as f:
        return [json.loads(line) for line in f]


def test_table2_single_rho(tmp_path: Path, capsys: pytest.CaptureFixture, ledger: RunLogService) -> None:
    config = _write(tmp_path, "n_paths = 20000\n")
    assert main(["table2", "--config", config, "--rho", "0", "--seed", "11"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "rho,best_estimate,std_error"
    assert len(lines) == 2
    rho, best_estimate, _ = lines[1].split(",")
    assert rho == "0"
    assert float(best_estimate) == pytest.approx(1.00667, abs=1e-3)
    event = _events(ledger)[-1]
    assert event["command"] == "table2"
    assert event["status"] == "success"
    assert event["seed"] == 11


def test_table2_is_deterministic(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    config = _write(tmp_path, "n_paths = 5000\nrho_grid = -1:0.5:1\n")
    assert main(["table2", "--config", config]) == 0
    first = capsys.readouterr().out
    assert main(["table2", "--config", config]) == 0
    assert capsys.readouterr().out == first
    assert len(first.splitlines()) == 6


def test_table2_writes_output_file(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    out = tmp_path / "table2.csv"
    config = _write(tmp_path, "n_paths = 2000\nrho_grid = 0.5\n")
    assert main(["table2", "--config", config, "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert out.read_text(encoding="utf-8").startswith("rho,best_estimate,std_error\n0.5,")


def test_coc_without_mortality_volatility(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    config = _write(tmp_path, "xi = 0\nn_paths = 2000\nrho_grid = 0, 0.5\n")
    assert main(["coc", "--config", config]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "rho,best_estimate,scr,coc_value,bs_benchmark"
    for line in lines[1:]:
        _, best_estimate, scr, coc_value, bs_benchmark = line.split(",")
        assert scr == "0"
        assert float(coc_value) == pytest.approx(float(best_estimate), abs=1e-5)
        assert float(bs_benchmark) == pytest.approx(float(coc_value), abs=1e-5)


def test_examples(capsys: pytest.CaptureFixture) -> None:
    assert main(["examples"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("example,quantity,value\n")
    assert "example4,ts_actuarial_value,105\n" in out
    assert "example4,invest,false\n" in out
    assert "example5,ts_actuarial_value," in out


@patch("app.services.verification.sample_actuarial_principle")
def test_verify_reports_broken_principle(
    mock_sampler: MagicMock, capsys: pytest.CaptureFixture, ledger: RunLogService
) -> None:
    mock_sampler.side_effect = _negative_loading
    with patch.object(verification, "SUITES", verification.SUITES[:2]), patch.object(settings, "verify_trials", 5):
        assert main(["verify", "--seed", "7"]) == 1
        first = capsys.readouterr().out
        assert main(["verify", "--seed", "7"]) == 1
        second = capsys.readouterr().out
    assert first == second
    assert first.splitlines()[0] == "PASS finite_space (trials=5)"
    assert first.splitlines()[1].startswith("FAIL principle_axioms: ")
    assert first.splitlines()[-1] == "verification failed (seed=7)"
    event = _events(ledger)[-1]
    assert event["status"] == "failure"
    assert event["exit_code"] == 1
    assert event["details"]["counterexample"]["name"] == "non_negative_loading"


def test_verify_passes(capsys: pytest.CaptureFixture) -> None:
    with patch.object(verification, "SUITES", verification.SUITES[:4]), patch.object(settings, "verify_trials", 3):
        assert main(["verify", "--seed", "1"]) == 0
    assert capsys.readouterr().out.splitlines()[-1] == "all suites passed (seed=1)"


def test_invalid_config_exits_with_2(tmp_path: Path, capsys: pytest.CaptureFixture, ledger: RunLogService) -> None:
    config = _write(tmp_path, "beta = -0.5\n")
    assert main(["coc", "--config", config]) == 2
    assert "error: beta: " in capsys.readouterr().err
    assert _events(ledger)[-1]["exit_code"] == 2


def test_unknown_key_exits_with_2(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    config = _write(tmp_path, "n_paths = 10\nvolatility = 0.2\n")
    assert main(["table2", "--config", config]) == 2
    assert "error: line 2: " in capsys.readouterr().err


def test_missing_config_exits_with_2(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    assert main(["table2", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert "error: " in capsys.readouterr().err


def test_unwritable_output_exits_with_2(tmp_path: Path, capsys: pytest.CaptureFixture, ledger: RunLogService) -> None:
    out = tmp_path / "no" / "such" / "dir" / "out.csv"
    config = _write(tmp_path, "n_paths = 100\nrho_grid = 0\n")
    assert main(["table2", "--config", config, "--out", str(out)]) == 2
    assert "error: " in capsys.readouterr().err
    assert not out.exists()
    assert _events(ledger)[-1]["exit_code"] == 2


@patch("app.commands.table2.best_estimate_with_error")
def test_unexpected_error_is_logged_and_exits_with_3(
    mock_estimate: MagicMock, tmp_path: Path, capsys: pytest.CaptureFixture, ledger: RunLogService
) -> None:
    mock_estimate.side_effect = IndexError("index 2 is out of bounds")
    config = _write(tmp_path, "n_paths = 100\nrho_grid = 0\n")
    assert main(["table2", "--config", config]) == 3
    assert "error: unexpected IndexError: index 2 is out of bounds" in capsys.readouterr().err
    event = _events(ledger)[-1]
    assert event["status"] == "failure"
    assert event["exit_code"] == 3
    assert event["message"].startswith("IndexError")


def test_unknown_command_is_rejected() -> None:
    with pytest.raises(SystemExit) as info:
        main(["price"])
    assert info.value.code == 2
