import csv
import io
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from qmix.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
ZERO_PLUS = str(CONFIGS / "zero_plus.json")
BLOCKS = str(CONFIGS / "orthogonal_blocks.json")


@pytest.fixture
def run():
    runner = CliRunner()

    def _run(*args):
        return runner.invoke(main, [str(a) for a in args])

    return _run


def test_entropy(run):
    res = run("entropy", "--config", ZERO_PLUS)
    assert res.exit_code == 0
    assert "S(rho) = 0.600876036693" in res.output
    assert "H(p) = 1" in res.output


def test_compress(run, tmp_path):
    out = tmp_path / "cell.csv"
    res = run("compress", "--config", ZERO_PLUS, "--rate", 0.85, "--block", 1, "--out", out)
    assert res.exit_code == 0, res.output
    assert "d = 1" in res.output
    assert "D = 0.292893218813" in res.output
    assert "holds" in res.output and "VIOLATED" not in res.output
    assert len(out.read_text().splitlines()) == 2


def test_sweep_rows_and_determinism(run, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        res = run("sweep", "--config", ZERO_PLUS, "--rates", "0.85,0.35", "--blocks", "1..3", "--out", path)
        assert res.exit_code == 0, res.output
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.DictReader(io.StringIO(a.read_text())))
    assert len(rows) == 6
    assert [(r["rate"], r["K"]) for r in rows][:3] == [("0.35", "1"), ("0.35", "2"), ("0.35", "3")]


def test_sweep_to_stdout(run):
    res = run("sweep", "--config", ZERO_PLUS, "--rates", "0.5", "--blocks", "2,4")
    assert res.exit_code == 0
    assert res.output.splitlines()[0].startswith("K,rate,d,xi")


def test_input_errors(run, tmp_path):
    assert run("entropy", "--config", tmp_path / "nope.json").exit_code == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dimension": 2, "signals": [{"probability": 0.5, "state": [[1, 0], [0, 0]]}]}))
    res = run("entropy", "--config", bad)
    assert res.exit_code == 2 and "sum" in res.output
    assert run("sweep", "--config", ZERO_PLUS, "--rates", "x", "--blocks", "1").exit_code == 2
    assert run("sweep", "--config", ZERO_PLUS, "--rates", "0.5", "--blocks", "3..1").exit_code == 2
    assert run("compress", "--config", ZERO_PLUS, "--rate", 0.5, "--block", 0).exit_code == 2
    assert run("verify", "--trials", 0).exit_code == 2


def test_resource_errors(run):
    res = run("compress", "--config", ZERO_PLUS, "--rate", 0.5, "--block", 6, "--max-strings", 16)
    assert res.exit_code == 3
    res = run("compress", "--config", BLOCKS, "--rate", 0.5, "--block", 6, "--max-dense-dim", 64)
    assert res.exit_code == 3
    res = run("sweep", "--config", ZERO_PLUS, "--rates", "0.5", "--blocks", "5,6", "--max-strings", 8)
    assert res.exit_code == 3


def test_hybrid(run):
    res = run("hybrid", "--config", BLOCKS, "--trials", 200)
    assert res.exit_code == 0
    assert "H(p) = 1 " in res.output and "S(rho) = 2 " in res.output
    assert "identified = 200" in res.output
    res = run("hybrid", "--config", ZERO_PLUS)
    assert res.exit_code == 4
    assert "orthogonal supports: no" in res.output


def test_verify(run):
    res = run("verify", "--trials", 3, "--suite", "eigen", "--suite", "lemma1")
    assert res.exit_code == 0, res.output
    assert "eigen" in res.output and "lemma1" in res.output
    res = run("verify", "--trials", 3, "--suite", "lemma1", "--inject-fault")
    assert res.exit_code == 1
    assert "FAIL" in res.output
