"""Command-line interface tests: exit codes, outputs, determinism."""

import json

import pytest

from gpig.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_piglet_rational(capsys):
    code, out, _ = run(capsys, "solve", "--preset", "piglet", "--target", "3",
                       "--mode", "rational")
    assert code == 0
    assert out.strip() == "6/11"


def test_solve_writes_csvs(capsys, tmp_path):
    table = tmp_path / "t.csv"
    policy = tmp_path / "p.csv"
    code, out, _ = run(capsys, "solve", "--preset", "piglet", "--target", "3",
                       "--mode", "rational", "--out", str(table),
                       "--policy", str(policy))
    assert code == 0
    assert table.read_text().splitlines()[0] == "a,b,value"
    assert policy.read_text().splitlines()[0] == "a,b,tau,action"


def test_solve_float_prints_eight_decimals(capsys):
    code, out, _ = run(capsys, "solve", "--preset", "pig", "--target", "10")
    assert code == 0
    whole, frac = out.strip().split(".")
    assert len(frac) == 8


def test_value_command(capsys):
    code, out, _ = run(capsys, "value", "--preset", "piglet", "--target", "3",
                       "--mode", "rational", "--a", "1", "--b", "2")
    assert code == 0
    assert out.strip() == "4/5"


def test_value_forced_win(capsys):
    code, out, _ = run(capsys, "value", "--preset", "pig", "--target", "10",
                       "--mode", "rational", "--a", "4", "--b", "7", "--tau", "5")
    assert code == 0
    assert out.strip() == "1"


def test_policy_command(capsys):
    code, out, _ = run(capsys, "policy", "--preset", "piglet", "--target", "2",
                       "--mode", "rational", "--a", "2", "--b", "2", "--tau", "1")
    assert code == 0
    assert out.strip() == "Roll"


def test_policy_forced_hold(capsys):
    code, out, _ = run(capsys, "policy", "--preset", "pig", "--target", "10",
                       "--mode", "rational", "--a", "4", "--b", "7", "--tau", "5")
    assert code == 0
    assert out.strip() == "Hold"


def test_curve_command(capsys, tmp_path):
    prefix = tmp_path / "curve"
    code, out, _ = run(capsys, "curve", "--preset", "piglet", "--target", "2",
                       "--mode", "rational", "--a", "1", "--b", "2",
                       "--out", str(prefix))
    assert code == 0
    assert out.strip() == "x=4/5 y=2/5"
    ab = (tmp_path / "curve_ab.csv").read_text().splitlines()
    ba = (tmp_path / "curve_ba.csv").read_text().splitlines()
    assert ab[0] == "y,f" and ba[0] == "y,f"
    assert ab[1:] == ["0,1", "1,1/2"]


def test_curve_symmetric_pair(capsys, tmp_path):
    prefix = tmp_path / "sym"
    code, out, _ = run(capsys, "curve", "--preset", "piglet", "--target", "1",
                       "--mode", "rational", "--a", "1", "--b", "1",
                       "--out", str(prefix))
    assert code == 0
    assert out.strip() == "x=2/3 y=2/3"
    assert (tmp_path / "sym_ab.csv").read_text() == (tmp_path / "sym_ba.csv").read_text()


def test_solitaire_command(capsys):
    code, out, _ = run(capsys, "solitaire", "--preset", "piglet", "--mode", "rational")
    assert code == 0
    assert out.strip() == "threshold=1 expected_score=1/2"


def test_bench_command(capsys, tmp_path):
    report = tmp_path / "bench.json"
    code, out, _ = run(capsys, "bench", "--preset", "pig", "--targets", "10,20",
                       "--out", str(report))
    assert code == 0
    data = json.loads(report.read_text())
    assert data["verdict"] in ("PASS", "FAIL")
    assert len(data["rows"]) == 2
    assert "scaling:" in out


def test_bench_single_target_has_no_verdict(capsys):
    code, out, _ = run(capsys, "bench", "--preset", "pig", "--targets", "10")
    assert code == 0
    assert "scaling:" not in out


def test_bench_rejects_rational_mode(capsys):
    code, _, err = run(capsys, "bench", "--preset", "pig", "--targets", "10",
                       "--mode", "rational")
    assert code == 2
    assert "float" in err


def test_bench_determinism(capsys, tmp_path):
    outs = []
    for name in ("r1.json", "r2.json"):
        path = tmp_path / name
        code, _, _ = run(capsys, "bench", "--preset", "pig", "--targets", "12",
                         "--out", str(path))
        assert code == 0
        data = json.loads(path.read_text())
        outs.append([
            {k: v for k, v in row.items() if k != "elapsed"} for row in data["rows"]
        ])
    assert outs[0] == outs[1]


def test_oracle_command(capsys):
    code, out, _ = run(capsys, "oracle", "--preset", "pig", "--max-target", "6")
    assert code == 0
    assert out.startswith("max discrepancy")
    assert float(out.split()[-1]) < 1e-7


def test_oracle_target_cap(capsys):
    code, _, err = run(capsys, "oracle", "--preset", "pig", "--max-target", "50")
    assert code == 2


def test_simulate_command(capsys):
    code, out, _ = run(capsys, "simulate", "--preset", "piglet", "--target", "3",
                       "--games", "5000", "--seed", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["games"] == 5000
    assert abs(rep["frequency"] - rep["expected_value"]) < 4 * rep["sigma"] + 1e-9


def test_missing_spec_is_input_error(capsys):
    code, _, err = run(capsys, "solve")
    assert code == 2
    assert "error:" in err


def test_nonexistent_file_is_input_error(capsys, tmp_path):
    code, _, err = run(capsys, "solve", str(tmp_path / "missing.json"))
    assert code == 2


def test_malformed_json_is_input_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "solve", str(bad))
    assert code == 2


def test_invalid_spec_is_input_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"probs": [0.5, 0.4], "target": 5}')
    code, _, err = run(capsys, "solve", str(bad))
    assert code == 2
    assert "sum" in err


def test_preset_and_file_conflict(capsys, tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text('{"probs": [0.5, 0.5], "target": 3}')
    code, _, err = run(capsys, "solve", str(spec), "--preset", "pig")
    assert code == 2


def test_env_mode_override(capsys, monkeypatch):
    monkeypatch.setenv("GPG_NUM_MODE", "rational")
    code, out, _ = run(capsys, "solve", "--preset", "piglet", "--target", "3")
    assert code == 0
    assert out.strip() == "6/11"


def test_env_mode_invalid(capsys, monkeypatch):
    monkeypatch.setenv("GPG_NUM_MODE", "decimal")
    code, _, err = run(capsys, "solve", "--preset", "piglet", "--target", "3")
    assert code == 2


def test_spec_file_solve(capsys, tmp_path):
    spec = tmp_path / "coin.json"
    spec.write_text('{"n": 1, "probs": ["1/2", "1/2"], "target": 3}')
    code, out, _ = run(capsys, "solve", str(spec), "--mode", "rational")
    assert code == 0
    assert out.strip() == "6/11"
