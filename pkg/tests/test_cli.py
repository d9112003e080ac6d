import json

from coarsealg.cli import main
from coarsealg.suites import shipped_path


def test_check_shipped_scenario_passes(capsys):
    assert main(["check", "path3-kernel"]) == 0
    out = capsys.readouterr().out
    assert "outcome: pass" in out and "kernel-split-bound" in out


def test_check_writes_a_report(tmp_path):
    out = tmp_path / "r.json"
    assert main(["check", "path3-kernel", "--json-out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["outcome"] == "pass"
    assert all(set(c) >= {"check", "outcome"} for c in rep["checks"])


def test_failing_check_exits_one_and_reports_a_witness(tmp_path):
    data = json.loads(shipped_path("cycle6-broken").read_text())
    for c in data["checks"]:
        c.pop("expect", None)
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(data))
    out = tmp_path / "r.json"
    assert main(["check", str(path), "--json-out", str(out)]) == 1
    rep = json.loads(out.read_text())
    first = rep["checks"][0]
    assert first["outcome"] == "fail"
    assert "S" in first["witness"]


def test_malformed_matrix_exits_two(tmp_path, capsys):
    data = json.loads(shipped_path("path3-kernel").read_text())
    data["maps"]["phi"]["matrix"] = [[1, -1, 0]]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    assert main(["check", str(path)]) == 2
    assert "maps.phi.matrix" in capsys.readouterr().err


def test_missing_file_and_bad_json_exit_two(tmp_path):
    assert main(["check", str(tmp_path / "nope.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["check", str(bad)]) == 2


def test_sampled_mode_needs_a_seed(tmp_path):
    data = json.loads(shipped_path("random-0").read_text())
    data["caps"].pop("seed", None)
    path = tmp_path / "s.json"
    path.write_text(json.dumps(data))
    assert main(["check", str(path), "--mode", "sampled"]) == 2
    assert main(["check", str(path), "--mode", "sampled", "--seed", "3"]) in (0, 1)


def test_gen_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["gen", "random", "seed=7", "-o", str(a)]) == 0
    assert main(["gen", "random", "--seed", "7", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(["check", str(a)]) in (0, 1)
    assert main(["gen", "random", "colour=red"]) == 2
    assert main(["gen", "path3-kernel", "--seed", "1"]) == 2


def test_gen_to_stdout(capsys):
    assert main(["gen", "path3-kernel"]) == 0
    assert json.loads(capsys.readouterr().out)["name"] == "path3-kernel"


def test_suite_runs(tmp_path):
    out = tmp_path / "s.json"
    assert main(["suite", "linalg-oracle", "--json-out", str(out)]) == 0
    (rep,) = json.loads(out.read_text())
    assert rep["suite"] == "linalg-oracle" and rep["outcome"] == "pass"
