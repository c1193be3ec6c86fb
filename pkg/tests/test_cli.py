import csv
import json
import math

import pytest

from qracrng.cli import CSV_COLUMNS, run_cli


def run(capsys, *argv):
    code = run_cli(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classical(capsys):
    code, out, _ = run(capsys, "classical", "--n", "3")
    assert code == 0 and out.strip() == "T_classical = 6"


def test_quantum(capsys, tmp_path):
    path = tmp_path / "opt.json"
    code, out, _ = run(capsys, "quantum", "--n", "2", "--starts", "100", "--seed", "7", "--out", str(path))
    assert code == 0
    value = float(out.split("=")[1])
    assert abs(value - 2.828427) < 1e-4
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["n"] == 2 and len(data["states"]) == 4


def test_unknown_subcommand_and_flag(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 2 and "invalid choice" in err
    code, _, err = run(capsys, "classical", "--n", "3", "--bogus", "1")
    assert code == 2 and "unrecognized" in err


def test_domain_error_is_usage_error(capsys):
    code, _, err = run(capsys, "classical", "--n", "0")
    assert code == 2 and "error" in err


def test_entropy_and_infeasible(capsys, tmp_path):
    code, out, _ = run(capsys, "entropy", "--n", "2", "--t", "2.828427", "--starts", "30",
                       "--witness-dir", str(tmp_path))
    assert code == 0
    assert float(out.splitlines()[1].split("=")[1]) == pytest.approx(0.2284, abs=0.01)
    assert (tmp_path / "witness_n2_t2.828427000.json").exists()
    code, out, _ = run(capsys, "entropy", "--n", "2", "--t", "2.9")
    assert code == 1


def test_curve_csv(capsys, tmp_path):
    path = tmp_path / "fig2.csv"
    argv = ["curve", "--n", "2", "--t-min", "2.0", "--t-max", "2.828427", "--steps", "4",
            "--starts", "20", "--seed", "3", "--out", str(path)]
    assert run(capsys, *argv)[0] == 0
    first = path.read_bytes()
    rows = list(csv.reader(first.decode("utf-8").splitlines()))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 5
    for row in rows[1:]:
        assert all(len(field.split(".")[1]) == 9 for field in (row[1], row[2], row[3], row[5]))
    assert float(rows[1][3]) == 0.0
    assert run(capsys, *argv)[0] == 0
    assert path.read_bytes() == first
    assert sorted(p.name for p in tmp_path.iterdir()) == ["fig2.csv"]


def test_verify_qrac3(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify-qrac3", "--out", str(path))
    assert code == 0 and "all_correct_equal = True" in out
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["t3"] == pytest.approx(4 * math.sqrt(3), abs=1e-9)
    assert list(data) == ["strategy", "xi", "t3", "s3", "h_min", "table", "all_correct_equal"]


def test_simulate_then_certify(capsys, tmp_path):
    tr = tmp_path / "run.json"
    code, _, _ = run(capsys, "simulate", "--strategy", "qrac3", "--rounds", "200000",
                     "--seed", "5", "--out", str(tr))
    assert code == 0
    first = tr.read_bytes()
    run(capsys, "simulate", "--strategy", "qrac3", "--rounds", "200000", "--seed", "5", "--out", str(tr))
    assert tr.read_bytes() == first
    code, out, _ = run(capsys, "certify", "--transcript", str(tr), "--confidence", "0.95", "--starts", "30")
    assert code == 0
    values = dict(line.split(" = ") for line in out.strip().splitlines())
    assert float(values["T_lower"]) < float(values["T_hat"])
    assert 0 < float(values["H_min_rate"]) < 0.3425


def test_simulate_from_strategy_file(capsys, tmp_path):
    strat = tmp_path / "s.json"
    run(capsys, "quantum", "--n", "2", "--starts", "5", "--out", str(strat))
    code, out, _ = run(capsys, "simulate", "--strategy", str(strat), "--rounds", "1000", "--seed", "1")
    assert code == 0 and "T_hat" in out
    assert run(capsys, "simulate", "--strategy", "optimal", "--rounds", "10")[0] == 2


def test_certify_insufficient_statistics(capsys, tmp_path):
    tr = tmp_path / "tiny.json"
    run(capsys, "simulate", "--strategy", "qrac3", "--rounds", "3", "--seed", "1", "--out", str(tr))
    code, _, err = run(capsys, "certify", "--transcript", str(tr))
    assert code == 1 and "insufficient statistics" in err


def test_config_file_precedence(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"starts": 1, "seed": 99}), encoding="utf-8")
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    run(capsys, "quantum", "--n", "3", "--config", str(cfg), "--out", str(a))
    run(capsys, "quantum", "--n", "3", "--config", str(cfg), "--starts", "1", "--seed", "99", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    cfg.write_text(json.dumps({"nonsense": 1}), encoding="utf-8")
    code, _, err = run(capsys, "quantum", "--n", "3", "--config", str(cfg))
    assert code == 2 and "nonsense" in err


def test_log_level_env(capsys, monkeypatch):
    monkeypatch.setenv("QRAC_LOG", "debug")
    code, out, _ = run(capsys, "classical", "--n", "2")
    assert code == 0 and out.strip() == "T_classical = 2"
