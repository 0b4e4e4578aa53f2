import csv
import json
import subprocess
import sys

import pytest

from qwalk.cli import CURVE_COLUMNS, main


@pytest.fixture
def maze_path(tmp_path):
    path = tmp_path / "maze.json"
    assert main(["generate", "--stars", "5", "--spokes", "40", "--seed", "2", "--out", str(path)]) == 0
    return path


def read_curve(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# ")
    return list(csv.DictReader(lines[1:]))


def test_generate(tmp_path, capsys):
    out = tmp_path / "m.json"
    argv = ["generate", "--topology", "chain", "--stars", "11", "--spokes", "450", "--seed", "3",
            "--out", str(out)]
    assert main(argv) == 0
    text = capsys.readouterr().out
    assert "9900" in text and "path" not in text
    first = out.read_bytes()
    assert json.loads(first)["M"] == 11
    assert main(argv + ["--reveal"]) == 0
    assert "path: S -> B1:" in capsys.readouterr().out
    assert out.read_bytes() == first


def test_generate_usage_errors(tmp_path, capsys):
    out = str(tmp_path / "m.json")
    assert main(["generate", "--stars", "0", "--spokes", "10", "--out", out]) == 1
    assert main(["generate", "--stars", "2", "--spokes", "2", "--out", out]) == 1
    assert main(["generate", "--stars", "2", "--spokes", "9", "--out", str(tmp_path / "no" / "m.json")]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["generate", "--stars", "x", "--spokes", "9", "--out", out])
    assert exc.value.code == 1


def test_curve(tmp_path, maze_path):
    out = tmp_path / "c.csv"
    assert main(["curve", "--maze", str(maze_path), "--init", "connection:2", "--target", "3",
                 "--max-steps", "30", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[1] == ",".join(CURVE_COLUMNS)
    rows = read_curve(out)
    assert [int(r["steps"]) for r in rows] == list(range(0, 31, 2))
    for r in rows:
        p = float(r["p_simulated"])
        assert 0 <= p <= 1
        assert abs(p - float(r["p_exact"])) < 1e-9
        assert abs(p - float(r["e_plus"]) ** 2 - float(r["e_minus"]) ** 2) < 1e-12


def test_curve_is_bit_stable(tmp_path, maze_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (a, b):
        main(["curve", "--maze", str(maze_path), "--init", "start", "--target", "1",
              "--max-steps", "20", "--out", str(out)])
    assert a.read_bytes() == b.read_bytes()
    value = read_curve(a)[5]["p_simulated"]
    assert len(value.replace(".", "").replace("-", "").split("e")[0].lstrip("0")) <= 17


def test_curve_superposed_and_two_star(tmp_path, maze_path):
    out = tmp_path / "c.csv"
    assert main(["curve", "--maze", str(maze_path), "--init", "superposed", "--target", "2",
                 "--max-steps", "20", "--out", str(out)]) == 0
    for r in read_curve(out):
        assert abs(float(r["p_simulated"]) - float(r["p_exact"])) < 1e-9
        assert r["p_bessel"] == ""
    assert main(["curve", "--maze", str(maze_path), "--init", "two-star:1", "--target", "1",
                 "--max-steps", "20", "--out", str(out)]) == 0
    rows = read_curve(out)
    assert all(r["p_exact"] == "" for r in rows)


def test_curve_on_ring(tmp_path):
    ring = tmp_path / "ring.json"
    main(["generate", "--topology", "ring", "--stars", "6", "--spokes", "20", "--out", str(ring)])
    out = tmp_path / "c.csv"
    assert main(["curve", "--maze", str(ring), "--init", "connection:6", "--target", "2",
                 "--max-steps", "40", "--out", str(out)]) == 0
    for r in read_curve(out):
        assert abs(float(r["p_simulated"]) - float(r["p_exact"])) < 1e-9
    assert main(["curve", "--maze", str(ring), "--init", "start", "--target", "1",
                 "--max-steps", "4", "--out", str(out)]) == 1


@pytest.mark.parametrize("init,target", [("connection:9", 1), ("start", 7), ("bogus", 1), ("two-star:x", 1)])
def test_curve_usage_errors(tmp_path, maze_path, init, target):
    assert main(["curve", "--maze", str(maze_path), "--init", init, "--target", str(target),
                 "--max-steps", "4", "--out", str(tmp_path / "c.csv")]) == 1
    assert not (tmp_path / "c.csv").exists()


def test_recover(tmp_path, maze_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["recover", "--maze", str(maze_path), "--strategy", "unknown-start",
                     "--trials", "4", "--seed", "5", "--out", str(out)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["config"]["strategy"] == "unknown_start"
    assert len(doc["results"]) == 4
    assert doc["summary"]["success_rate"] == 1.0
    assert "mean_unitary_applications" in capsys.readouterr().out


def test_recover_rejects_ring(tmp_path):
    ring = tmp_path / "ring.json"
    main(["generate", "--topology", "ring", "--stars", "3", "--spokes", "10", "--out", str(ring)])
    assert main(["recover", "--maze", str(ring), "--strategy", "successive",
                 "--out", str(tmp_path / "r.json")]) == 1


def test_verify(capsys):
    assert main(["verify", "--suite", "subspace"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"] and doc["suites"][0]["suite"] == "subspace"


def test_verify_failure_exit_code(monkeypatch, capsys):
    from qwalk import cli
    from qwalk.verify import VerifyReport

    def failing():
        rep = VerifyReport("bounds")
        rep.check("forced", 1.0, 0.0)
        return rep

    monkeypatch.setitem(cli.SUITES, "bounds", failing)
    monkeypatch.setattr(cli, "run_suite", lambda name: cli.SUITES[name]())
    assert main(["verify", "--suite", "bounds"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qwalk", "verify", "--suite", "nope"],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    proc = subprocess.run([sys.executable, "-m", "qwalk", "verify", "--suite", "mirror"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["passed"]
