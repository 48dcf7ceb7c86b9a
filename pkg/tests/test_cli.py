import json
import subprocess
import sys
import time

import pytest
import yaml

from ergodic_dse.cli import EXIT_CAMPAIGN, EXIT_CONFIG, EXIT_OK, EXIT_SIM, main
from ergodic_dse.report import read_csv


def _fragile(tmp_path, max_cycles=150):
    raw = {"name": "fragile", "space": [{"name": "D(s1)", "kind": "delay", "min": 1, "max": 40},
                                        {"name": "N(s1)", "kind": "throughput", "min": 1, "max": 4}],
           "topology": {"kind": "chain", "stages": 1}, "workload": {"kind": "serial", "n_jobs": 10},
           "sim": {"max_cycles": max_cycles}, "points": {"slow": {"D(s1)": 30}, "fast": {"D(s1)": 1}}}
    path = tmp_path / "fragile.yaml"
    path.write_text(yaml.safe_dump(raw))
    return str(path)


def _files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir()) if p.suffix in (".csv", ".json")}


def test_simulate_prints_and_repeats(capsys):
    assert main(["simulate", "--config", "tiny4", "--y", "1,2,3,4"]) == EXIT_OK
    first = capsys.readouterr().out
    assert main(["simulate", "--config", "tiny4", "--y", "1,2,3,4"]) == EXIT_OK
    assert capsys.readouterr().out == first
    keys = [line.split()[0] for line in first.splitlines()]
    assert keys == ["execution_time", "cost", "objective"]


def test_simulate_out_of_box_names_parameter(capsys):
    assert main(["simulate", "--config", "tiny4", "--y", "1,1,1,5"]) == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "L(X1)" in err and "outside" in err


def test_simulate_wrong_dimension(capsys):
    assert main(["simulate", "--config", "tiny4", "--y", "1,2"]) == EXIT_CONFIG
    assert "space has 4" in capsys.readouterr().err


def test_simulate_set_and_point(tmp_path, capsys):
    assert main(["simulate", "--config", "tiny4", "--point", "mid", "--set", "D(L2)=1", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "simulate.json").read_text())
    assert data["result"]["point"]["D(L2)"] == 1.0 and data["result"]["point"]["N(L2)"] == 2.5
    assert data["seed"] == 0 and data["config"]["name"] == "tiny4"
    assert main(["simulate", "--config", "tiny4", "--set", "Q(x)=1"]) == EXIT_CONFIG


def test_reference_optimum_accepted_as_fractional_point(capsys):
    assert main(["simulate", "--config", "table2", "--point", "reference_opt"]) == EXIT_OK
    out = capsys.readouterr().out
    assert int(out.split()[1]) > 0


def test_simulate_trace_format(tmp_path, capsys):
    trace = tmp_path / "trace.txt"
    assert main(["simulate", "--config", _fragile(tmp_path), "--point", "fast", "--trace", str(trace)]) == 0
    lines = trace.read_text().splitlines()
    assert lines[0].startswith("# workload")
    events = [ln.split() for ln in lines[1:]]
    assert events and all(len(e) == 4 and e[0].isdigit() for e in events)
    cycles = [int(e[0]) for e in events]
    assert cycles == sorted(cycles)


def test_simulation_abort_exit_code(tmp_path, capsys):
    assert main(["simulate", "--config", _fragile(tmp_path), "--point", "slow"]) == EXIT_SIM
    assert "cycle" in capsys.readouterr().err


def test_config_errors_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("space: [\n")
    assert main(["simulate", "--config", str(bad)]) == EXIT_CONFIG
    assert "line" in capsys.readouterr().err
    assert main(["simulate", "--config", str(tmp_path / "missing.yaml")]) == EXIT_CONFIG


def test_scan_rejects_single_point(tmp_path, capsys):
    assert main(["scan", "--config", "tiny4", "--points", "1", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_scan_outputs(tmp_path, capsys):
    out = tmp_path / "s"
    assert main(["scan", "--config", "tiny4", "--random", "3", "--points", "7", "--seeds-per-point", "2",
                 "--out", str(out)]) == EXIT_OK
    for i in range(3):
        text = (out / f"line_{i:02d}.csv").read_text().splitlines()
        assert text[0] == "# seed=0" and text[1].startswith("# config={")
        header, rows = read_csv(out / f"line_{i:02d}.csv")
        assert header[:3] == ["line_id", "point_index", "t"] and len(rows) == 7
    assert (out / "scan_lines.png").stat().st_size > 0
    meta = json.loads((out / "scan.json").read_text())
    assert meta["settings"]["points"] == 7 and len(meta["lines"]) == 3


def test_scan_between_named_points_without_plots(tmp_path, capsys):
    raw = yaml.safe_load(open(_fragile(tmp_path)))
    raw["points"]["slow"] = {"D(s1)": 5}
    (tmp_path / "c.yaml").write_text(yaml.safe_dump(raw))
    out = tmp_path / "s"
    assert main(["scan", "--config", str(tmp_path / "c.yaml"), "--line", "fast:slow", "--points", "5",
                 "--out", str(out), "--no-plots"]) == EXIT_OK
    assert not (out / "scan_lines.png").exists()
    _, rows = read_csv(out / "line_00.csv")
    assert [float(r[3]) for r in rows] == [1.0, 2.0, 3.0, 4.0, 5.0]


@pytest.mark.parametrize("argv", [
    ["scan", "--random", "2", "--points", "6", "--seeds-per-point", "2", "--no-plots"],
    ["optimize", "--alphas", "0,1", "--starts", "2", "--budget", "15", "--no-plots"],
    ["anneal", "--alphas", "1", "--runs", "2", "--budget", "30", "--no-plots"],
    ["exhaust", "--alphas", "0,1e4"],
])
def test_rerun_is_byte_identical(tmp_path, capsys, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main([*argv, "--config", "tiny4", "--seed", "11", "--out", str(d)]) == EXIT_OK
    fa, fb = _files(a), _files(b)
    assert fa and fa == fb
    c = tmp_path / "c"
    assert main([*argv, "--config", "tiny4", "--seed", "11", "--out", str(c), "--parallel", "2"]) == EXIT_OK
    assert _files(c) == fa


def test_optimize_smoke_run(tmp_path, capsys):
    t0 = time.perf_counter()
    assert main(["optimize", "--config", "tiny4", "--alphas", "0", "--starts", "1", "--budget", "20",
                 "--out", str(tmp_path)]) == EXIT_OK
    assert time.perf_counter() - t0 < 60
    for name in ("campaign.json", "convergence.csv", "summary.csv", "runs.csv", "tradeoff.csv",
                 "parameters.csv", "convergence.png", "tradeoff.png"):
        assert (tmp_path / name).exists(), name
    header, rows = read_csv(tmp_path / "parameters.csv")
    assert header == ["alpha", "name", "kind", "min", "max", "opt", "rounded"] and len(rows) == 4
    camp = json.loads((tmp_path / "campaign.json").read_text())
    assert camp["seed"] == 0 and camp["settings"]["budget"] == 20
    run = camp["runs"][0]
    assert run["n_evals"] <= 20 and run["improvement"] >= 1 and len(run["rounded_x"]) == 4
    _, conv = read_csv(tmp_path / "convergence.csv")
    assert len(conv) == run["n_evals"]


def test_optimize_usage_errors(tmp_path, capsys):
    assert main(["optimize", "--config", "tiny4", "--budget", "3", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["optimize", "--config", "tiny4", "--alphas", "-1", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["optimize", "--config", "tiny4", "--starts", "0", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_campaign_failure_exit_code(tmp_path, capsys):
    out = tmp_path / "o"
    code = main(["optimize", "--config", _fragile(tmp_path), "--alphas", "0", "--starts", "6", "--budget", "15",
                 "--out", str(out), "--no-plots"])
    assert code == EXIT_CAMPAIGN
    assert "failed" in capsys.readouterr().err
    _, rows = read_csv(out / "runs.csv")
    assert "failed" in {r[2] for r in rows}


def test_exhaust_outputs(tmp_path, capsys):
    assert main(["exhaust", "--config", "tiny4", "--alphas", "0", "--out", str(tmp_path)]) == EXIT_OK
    _, rows = read_csv(tmp_path / "lattice.csv")
    assert len(rows) == 256
    optima = json.loads((tmp_path / "optima.json").read_text())["optima"]
    assert optima[0]["execution_time"] == min(float(r[4]) for r in rows)
    assert main(["exhaust", "--config", "table2", "--out", str(tmp_path)]) == EXIT_CONFIG


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ergodic_dse.cli", "simulate", "--config", "tiny4", "--y",
                           "1,1,1,1"], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0 and proc.stdout.startswith("execution_time 371")
    proc = subprocess.run([sys.executable, "-m", "ergodic_dse.cli", "simulate"], capture_output=True, text=True)
    assert proc.returncode == 2
