import json
from pathlib import Path
from unittest.mock import MagicMock, patch

from app.services.run_log import RunLogService


def test_log_appends_json_lines(tmp_path: Path) -> None:
    service = RunLogService(str(tmp_path / "nested" / "runs.jsonl"))
    service.log(command="table2", seed=5)
    service.log(command="verify", status="failure", seed=5, exit_code=1, message="suite failed", details={"k": 1})
    lines = (tmp_path / "nested" / "runs.jsonl").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    first, second = (json.loads(line) for line in lines)
    assert first["command"] == "table2"
    assert first["status"] == "success"
    assert first["exit_code"] == 0
    assert "timestamp" in first
    assert second["details"] == {"k": 1}
    assert second["message"] == "suite failed"


def test_empty_path_disables_the_ledger(tmp_path: Path) -> None:
    service = RunLogService("")
    service.log(command="examples")
    assert list(tmp_path.iterdir()) == []


@patch("app.services.run_log.os.makedirs")
def test_write_failure_is_only_a_warning(mock_makedirs: MagicMock, tmp_path: Path) -> None:
    mock_makedirs.side_effect = PermissionError("read-only")
    service = RunLogService(str(tmp_path / "locked" / "runs.jsonl"))
    service.log(command="coc")
    assert not (tmp_path / "locked").exists()
