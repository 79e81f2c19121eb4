import json

import pytest

from sneakernet.cli import main, replay

HEADER = "name,pitch_m,gate_time_s,error_rate\n"


def run_cli(tmp_path, *args, sub="out"):
    out = tmp_path / sub
    code = main([*args, "--out-dir", str(out)])
    return code, out


def test_table1_default(tmp_path, capsys):
    code, out = run_cli(tmp_path, "table1")
    assert code == 0
    text = (out / "table1.csv").read_text()
    lines = text.strip().splitlines()
    assert len(lines) == 7
    assert sum(",yes," in line for line in lines) == 5
    assert "MISMATCH:bandwidth" in next(line for line in lines if line.startswith("NV-,"))
    manifest = json.loads((out / "table1.manifest.json").read_text())
    assert manifest["command"] == "table1" and "table1.csv" in manifest["outputs"]
    assert capsys.readouterr().out == text


def test_table1_catalog_errors(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    code, _ = run_cli(tmp_path, "table1", "--catalog", str(empty))
    assert code == 1
    bad = tmp_path / "bad.csv"
    bad.write_text(HEADER + "x,1e-3,oops,1e-3\n")
    code, _ = run_cli(tmp_path, "table1", "--catalog", str(bad))
    assert code == 1
    assert f"{bad}:2:" in capsys.readouterr().err
    one = tmp_path / "one.csv"
    one.write_text(HEADER + "ions,1.5e-3,1e-4,1e-5\n")
    code, out = run_cli(tmp_path, "table1", "--catalog", str(one), "--format", "machine")
    assert code == 0
    assert len(json.loads((out / "table1.json").read_text())["rows"]) == 1


def test_usage_error_exit_code(tmp_path):
    assert main(["no-such-command"]) == 2
    assert main(["threshold", "--d", "x"]) == 2
    code, _ = run_cli(tmp_path, "memory-time")
    assert code == 2


def test_threshold_envelope(tmp_path):
    assert run_cli(tmp_path, "threshold", "--trials", "0")[0] == 1
    assert run_cli(tmp_path, "threshold", "--d", "11")[0] == 1
    assert run_cli(tmp_path, "threshold", "--trials", "20000000")[0] == 1


def test_threshold_upper_bounds(tmp_path):
    code, out = run_cli(tmp_path, "threshold", "--d", "3", "--p", "0.0004", "--trials", "100000")
    assert code == 0
    rows = (out / "threshold.csv").read_text().strip().splitlines()
    header = rows[0].split(",")
    row = dict(zip(header, rows[1].split(",")))
    if row["failures"] == "0":
        assert row["upper_bound_only"] == "true" and row["p_l"] == "" and float(row["ci_high"]) > 0
    assert (out / "threshold-crossing.csv").exists()


def test_fit_from_csv(tmp_path):
    data = tmp_path / "stats.csv"
    rows = ["d,p,trials,failures"]
    for d in (3, 5, 7):
        for p in (1e-3, 2e-3, 4e-3):
            rows.append(f"{d},{p},1000000000,{round(1e9 * 0.3 * (70 * p) ** ((d + 1) / 2))}")
    data.write_text("\n".join(rows) + "\n")
    code, out = run_cli(tmp_path, "fit", "--input", str(data), "--format", "machine")
    assert code == 0
    doc = json.loads((out / "fit.json").read_text())
    assert doc["alpha"] == pytest.approx(0.3, rel=0.01) and doc["beta"] == pytest.approx(70, rel=0.01)
    data.write_text("d,p,trials,failures\n3,1e-3,10,x\n")
    assert run_cli(tmp_path, "fit", "--input", str(data))[0] == 1


def test_select_distance_and_memory_time(tmp_path):
    code, out = run_cli(tmp_path, "select-distance", "--platform", "transmons")
    assert code == 0
    assert "transmons,13,625" in (out / "select-distance.csv").read_text()
    code, out = run_cli(tmp_path, "memory-time", "--gate-time", "3.5e-6", "--p", "1e-3",
                        "--n", "4225", "--p-link-grid", "1e-10")
    assert code == 0
    row = (out / "memory-time.csv").read_text().splitlines()[1].split(",")
    assert float(row[3]) == pytest.approx(9.93e6, rel=0.01)
    code, out = run_cli(tmp_path, "select-distance", "--platform", "nope")
    assert code == 1


def test_surgery_check_report(tmp_path):
    code, out = run_cli(tmp_path, "surgery-check", "--seeds", "4", "--format", "machine")
    assert code == 0
    doc = json.loads((out / "surgery-check.json").read_text())
    assert doc["cases"] == 8 and doc["all_passed"]
    assert run_cli(tmp_path, "surgery-check", "--inputs", "+x")[0] == 2


def test_netsim_scenario_and_replay(tmp_path):
    scenario = tmp_path / "s.json"
    scenario.write_text(json.dumps({"teu_count": 5, "warm_start": False}))
    code, out = run_cli(tmp_path, "netsim", "--scenario", str(scenario), "--format", "machine")
    assert code == 0
    report = json.loads((out / "netsim.json").read_text())
    assert report["first_departure_days"] > 0 and report["deadlock"] is None
    log = (out / "netsim-events.csv").read_text()
    assert log.startswith("time,event,container,location,ebits\n")
    assert replay(out / "netsim.manifest.json", tmp_path / "again") == 0
    again = tmp_path / "again"
    for name in ("netsim.json", "netsim-events.csv", "netsim.manifest.json"):
        assert (again / name).read_bytes() == (out / name).read_bytes()


def test_netsim_bad_scenarios(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_cli(tmp_path, "netsim", "--scenario", str(bad))[0] == 1
    bad.write_text(json.dumps({"unknown_key": 1}))
    assert run_cli(tmp_path, "netsim", "--scenario", str(bad))[0] == 1
    zero = tmp_path / "zero.json"
    zero.write_text(json.dumps({"capacity": 0, "teu_count": 3}))
    code, out = run_cli(tmp_path, "netsim", "--scenario", str(zero), "--format", "machine")
    assert code == 0 and json.loads((out / "netsim.json").read_text())["realized_bandwidth_hz"] == 0


def test_sweep_small(tmp_path):
    scenario = tmp_path / "s.json"
    # 5000 slots: per-stick turnaround 345.6 s, about 19.7x the full-speed stick time
    scenario.write_text(json.dumps({"teu_count": 5000}))
    code, out = run_cli(tmp_path, "sweep", "--scenario", str(scenario), "--slowdown", "1", "15", "25",
                        "--online", "1", "2", "--format", "machine")
    assert code == 0
    doc = json.loads((out / "sweep.json").read_text())
    assert doc["monotone"] is True
    assert doc["max_full_slowdown_grid"] == {"1": 15.0, "2": 25.0}


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("SNEAKERNET_OUT_DIR", str(tmp_path / "env"))
    assert main(["select-distance"]) == 0
    assert (tmp_path / "env" / "select-distance.manifest.json").exists()
