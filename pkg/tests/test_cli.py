import json
from fractions import Fraction
import pathlib
import subprocess
import sys

import pytest

from graphdyn.cli import main

ROOT = pathlib.Path(__file__).parents[1]
SWAP = ROOT / "demos" / "data" / "edge_swap.json"


def run(*args):
    proc = subprocess.run([sys.executable, "-m", "graphdyn", *args], capture_output=True, text=True, cwd=ROOT)
    return proc.returncode, proc.stdout, proc.stderr


def report(*args):
    code, out, err = run(*args, "--no-timestamp")
    assert code == 0, err
    return json.loads(out)


def test_analyze_period_two():
    r = report("analyze", "--builtin", "tent", "--point", "e0:2/5", "--iters", "100")
    assert r["schema_version"] == 1
    assert r["result"]["omega"]["points"] == ["e0:2/5", "e0:4/5"]
    assert r["result"]["periodic"]["period"] == 2


def test_analyze_fixed_point():
    r = report("analyze", "--builtin", "tent", "--point", "e0:2/3")
    assert r["result"]["periodic"] == {"period": 1, "cycle": ["e0:2/3"]}


@pytest.mark.parametrize("bad", [["--point", "e0:1/0"], ["--point", "zz:1/2"], ["--point", "e0:3/2"]])
def test_analyze_bad_point(bad):
    code, out, err = run("analyze", "--builtin", "tent", *bad)
    assert code == 1 and out == "" and "error" in err


def test_bad_map_file(tmp_path):
    doc = json.loads(SWAP.read_text())
    doc["map"]["pieces"][0]["b"] = "7/2"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run("entropy", "--map", str(path))
    assert code == 1 and "piece on e0" in err
    code, _, err = run("entropy", "--map", str(tmp_path / "missing.json"))
    assert code == 1


def test_usage_error_exit_code():
    assert run("frobnicate")[0] == 1
    assert run("verify", "--suite", "nope")[0] == 1


def test_resource_cap_exit_code(monkeypatch, capsys):
    monkeypatch.setenv("GRAPHDYN_CAP", "5")
    code = main(["verify", "--suite", "chain", "--no-timestamp"])
    assert code == 2
    assert "resource cap" in capsys.readouterr().err


def test_steer_period_two(tmp_path):
    out = tmp_path / "branch.txt"
    r = report("steer", "--builtin", "tent", "--start", "e0:1/2", "--target-orbit", "e0:2/5",
               "--depth", "60", "--out", str(out))
    assert r["result"]["hausdorff_float"] < 1 / 100
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# waypoints=e0:2/5,e0:4/5")
    assert lines[3] == "0:e0:1/2" and lines[-1].startswith("-60:e0:")
    csv = (tmp_path / "branch.txt.csv").read_text().splitlines()
    assert csv[0] == "index,edge,t,t_float" and len(csv) == 62


def test_steer_figure2_left_start(tmp_path):
    out = tmp_path / "fig2.txt"
    r = report("steer", "--builtin", "figure2", "--start", "e0:31/64", "--target-set", "e0:1/2",
               "--depth", "40", "--out", str(out))
    assert r["result"]["branch"]["depth"] == 40
    ts = [Fraction(line.split(":")[2]) for line in out.read_text().splitlines() if not line.startswith("#")]
    # no preimage step creeps toward 1/2 from the left; the first one lands near q = 1/8 or r = 7/8
    assert min(abs(ts[1] - Fraction(1, 8)), abs(ts[1] - Fraction(7, 8))) <= Fraction(1, 16)
    assert not any(Fraction(3, 16) < t < Fraction(1, 2) for t in ts[1:])


def test_steer_fixed_point_zero_distance():
    r = report("steer", "--builtin", "tent", "--start", "e0:2/3", "--target-set", "e0:2/3", "--depth", "10")
    assert r["result"]["hausdorff"] == "0/1"


def test_steer_target_omega_and_strategy():
    r = report("steer", "--builtin", "figure2", "--start", "e0:33/64", "--target-omega", "e0:1/2",
               "--strategy", "lookahead:2", "--dwell", "1", "--depth", "20")
    assert r["result"]["plan"]["strategy"] == "greedy_with_lookahead(2)"
    assert r["result"]["branch"]["tail"][-1] == "e0:" + f"{2**25 + 1}/{2**26}"
    assert run("steer", "--builtin", "tent", "--start", "e0:1/2", "--target-set", "e0:1/2",
               "--strategy", "bogus")[0] == 1


def test_entropy_reports():
    r = report("entropy", "--builtin", "tent")
    assert abs(r["result"]["entropy"] - 0.6931471805599453) < 1e-9 and r["result"]["mixing"]
    r = report("entropy", "--builtin", "cantor_bumps:2")
    assert r["result"]["entropy"] == 0.0 and not r["result"]["mixing"]
    assert len(r["result"]["partition"]["cells"]) == 10
    r = report("entropy", "--map", str(SWAP))
    assert r["result"]["entropy"] == 0.0 and r["result"]["transitive"] and not r["result"]["mixing"]
    assert r["result"]["partition"]["matrix"] == [[0, 1], [1, 0]]
    r = report("entropy", "--builtin", "doubling_circle", "--inaccessible")
    assert r["result"]["inaccessible"]["points"] == []


def test_timestamp_toggle():
    code, out, _ = run("entropy", "--builtin", "tent")
    assert code == 0 and "timestamp" in json.loads(out)
    assert "timestamp" not in report("entropy", "--builtin", "tent")


@pytest.mark.parametrize("suite,extra", [
    ("mixing", ["--budget", "3"]),
    ("zero-entropy", ["--map", str(SWAP.parent.parent / "data" / "edge_swap.json"), "--budget", "5"]),
    ("figure2", []),
])
def test_verify_suites_report(suite, extra):
    code, out, err = run("verify", "--suite", suite, "--no-timestamp", *extra)
    assert code == 0, err
    r = json.loads(out)
    assert r["result"]["suite"] == suite
    ids = [a["id"] for a in r["result"]["assertions"]]
    assert ids == sorted(ids)


def test_verify_failures_carry_witnesses():
    r = report("verify", "--suite", "zero-entropy", "--map", str(SWAP), "--budget", "5")
    failed = [a for a in r["result"]["assertions"] if not a["passed"]]
    # the edge swap has no fixed arcs, so random branches do not settle on a periodic orbit
    assert all("witness" in a for a in failed)
