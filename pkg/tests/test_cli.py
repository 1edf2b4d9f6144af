"""End-to-end checks of the command line front end.

Most tests call main() in process so exit codes and stdout are easy to
assert; one smoke test goes through `python3 -m cclab` to prove the
installed entry point works.
"""

import json
import os
import subprocess
import sys

import pytest

from cclab.cli import main
from cclab.matrix import CellResult


def run_cli(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


@pytest.fixture
def run_dir(tmp_path, capsys):
    """A completed short-transfer run directory."""
    out = tmp_path / "run"
    rc = main(["run", "--variant", "newreno", "--size", "50",
               "--seed", "11", "--out", str(out)])
    capsys.readouterr()
    assert rc == 0
    return out


def test_run_writes_outputs_and_reports(tmp_path, capsys):
    out = tmp_path / "out"
    rc, stdout, _ = run_cli(capsys, "run", "--variant", "cubic",
                            "--duration", "5", "--seed", "3", "--out", str(out))
    assert rc == 0
    assert (out / "summary.json").is_file()
    assert (out / "timeseries.csv").is_file()
    assert "flow 0 [cubic]:" in stdout
    assert "aggregate goodput" in stdout
    stored = json.loads((out / "summary.json").read_text())
    assert stored["variant"] == "cubic"
    assert stored["seed"] == 3


def test_run_short_transfer_moves_whole_payload(run_dir):
    stored = json.loads((run_dir / "summary.json").read_text())
    assert stored["flows"][0]["unique_bytes"] == 50 * 1024


def test_stats_verifies_untouched_summary(run_dir, capsys):
    rc, stdout, _ = run_cli(capsys, "stats", str(run_dir))
    assert rc == 0
    assert "verify ok" in stdout


def test_stats_detects_tampered_goodput(run_dir, capsys):
    path = run_dir / "summary.json"
    stored = json.loads(path.read_text())
    stored["flows"][0]["goodput_kbps"] += 1.0
    path.write_text(json.dumps(stored))

    rc, stdout, _ = run_cli(capsys, "stats", str(run_dir))
    assert rc == 1
    assert "VERIFY FAILED" in stdout
    assert "flow 0 goodput" in stdout


def test_stats_replay_confirms_summary(run_dir, capsys):
    rc, stdout, _ = run_cli(capsys, "stats", str(run_dir), "--replay")
    assert rc == 0
    assert "fresh replay" in stdout


def test_replay_catches_tamper_that_arithmetic_misses(run_dir, capsys):
    # the timeout count is a raw counter, not derivable from the other
    # stored fields, so only a re-simulation can contradict it
    path = run_dir / "summary.json"
    stored = json.loads(path.read_text())
    stored["flows"][0]["timeouts"] += 1
    path.write_text(json.dumps(stored))

    rc, _, _ = run_cli(capsys, "stats", str(run_dir))
    assert rc == 0
    rc, stdout, _ = run_cli(capsys, "stats", str(run_dir), "--replay")
    assert rc == 1
    assert "replay flows" in stdout


def test_missing_run_dir_is_a_usage_error(tmp_path, capsys):
    rc, _, stderr = run_cli(capsys, "stats", str(tmp_path / "nowhere"))
    assert rc == 2
    assert "error:" in stderr


def test_invalid_config_is_a_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[experiment]\nflows = 0\n")
    rc, _, stderr = run_cli(capsys, "run", "--config", str(bad),
                            "--out", str(tmp_path / "out"))
    assert rc == 2
    assert "error:" in stderr


def test_matrix_smoke(tmp_path, capsys):
    ini = tmp_path / "matrix.ini"
    ini.write_text(
        "[experiment]\nseed = 5\n"
        "[matrix]\nvariants = newreno, westwood+\nflows = 1\n"
        "scenarios = short:50\nruns = 1\n")
    out = tmp_path / "sweep"
    rc, stdout, _ = run_cli(capsys, "matrix", "--config", str(ini),
                            "--out", str(out))
    assert rc == 0
    assert "2/2 cells ok" in stdout
    assert (out / "tables" / "short50kb_goodput_kbps.csv").is_file()
    assert (out / "matrix_summary.json").is_file()


def test_matrix_exit_code_reflects_failed_cells(tmp_path, capsys, monkeypatch):
    broken = CellResult("newreno", 1, "short50kb", runs=[], error="boom")
    monkeypatch.setattr("cclab.cli.run_matrix", lambda config: [broken])

    ini = tmp_path / "matrix.ini"
    ini.write_text(
        "[experiment]\nseed = 5\n"
        "[matrix]\nvariants = newreno\nflows = 1\nscenarios = short:50\nruns = 1\n")
    rc, stdout, _ = run_cli(capsys, "matrix", "--config", str(ini),
                            "--out", str(tmp_path / "sweep"))
    assert rc == 1
    assert "FAILED: boom" in stdout


def test_module_entry_point(tmp_path):
    out = tmp_path / "out"
    proc = subprocess.run(
        [sys.executable, "-m", "cclab", "run", "--size", "50",
         "--seed", "1", "--out", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert os.path.isfile(out / "summary.json")
