import csv
import io
import json
from pathlib import Path

import pytest

from fbqueue.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_stationary_csv(capsys):
    code, out, _ = run(capsys, "stationary", "--model", str(CONFIGS / "batch_erlang.yaml"), "--format", "csv")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert sum(float(r[-1]) for r in rows[1:]) == pytest.approx(1.0, abs=1e-12)


def test_json_provenance(capsys, tmp_path):
    dest = tmp_path / "o.json"
    code, _, _ = run(capsys, "busy-period", "--model", str(CONFIGS / "mm1n.yaml"), "--r", "2",
                     "--output", str(dest))
    assert code == 0
    doc = json.loads(dest.read_text())
    assert doc["command"] == "busy-period"
    assert len(doc["provenance"]["config_hash"]) == 64
    assert doc["table"]["rows"]


def test_bad_config_names_key(capsys):
    code, _, err = run(capsys, "stationary", "--model", str(CONFIGS / "bad.yaml"))
    assert code == 2
    assert "arrival.mu" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "stationary", "--model", "nowhere.yaml")
    assert code == 2 and "not found" in err


def test_domain_error_exit_code(capsys):
    code, _, err = run(capsys, "busy-period", "--model", str(CONFIGS / "mm1n.yaml"), "--r", "0")
    assert code == 2 and err


def test_transient_monotone_in_level(capsys):
    code, out, _ = run(capsys, "transient", "--model", str(CONFIGS / "batch_erlang.yaml"), "--r", "2",
                       "--levels", "0..B+1", "--times", "0.5,5", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    cols = doc["table"]["columns"]
    rows = doc["table"]["rows"]
    for t in (0.5, 5.0):
        vals = [r[cols.index("cdf")] for r in rows if r[cols.index("t")] == t]
        assert len(vals) == 8
        assert all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))
        assert vals[-1] == pytest.approx(1.0, abs=1e-6)


def test_first_loss_count_law(capsys):
    code, out, _ = run(capsys, "first-loss", "--model", str(CONFIGS / "mm1n.yaml"), "--r", "1")
    assert code == 0
    doc = json.loads(out)
    assert "loss_count_pmf" in doc


def test_simulate_histogram(capsys, tmp_path):
    h = tmp_path / "h.csv"
    code, out, _ = run(capsys, "simulate", "--model", str(CONFIGS / "mm1n.yaml"), "--estimands",
                       "occupancy_at_t", "--replications", "200", "--horizon", "2", "--seed", "9",
                       "--histogram", str(h), "--histogram-of", "occupancy_at_t")
    assert code == 0 and h.exists()
    assert json.loads(out)["provenance"]["seed"] == 9


def test_verify_quick(capsys):
    code, out, _ = run(capsys, "verify", "--model", str(CONFIGS / "batch_erlang.yaml"), "--quick")
    assert code == 0, out
