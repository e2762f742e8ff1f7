import io
import math
import shutil
import subprocess

import pytest

from robust_outage import cli
from robust_outage.cli import CSV_HEADER, SweepRecord, main, parse_snr_range, read_sweep_csv, write_sweep_csv


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def fields(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line and ":" not in line.split("=")[0])


def same(a, b):
    return a == b or (math.isnan(a) and math.isnan(b))


# solve

def test_solve_without_uncertainty():
    code, text = run("solve", "--eps", "0.3", "--d", "0", "--class", "fwd-kl")
    assert code == 0
    assert float(fields(text)["p_out"]) == 0.3


def test_solve_reverse_floor():
    code, text = run("solve", "--eps", "0", "--d", "0.1", "--class", "rev-kl")
    assert code == 0
    assert float(fields(text)["p_out"]) == pytest.approx(0.0951626, abs=1e-7)


def test_solve_forward_reports_everything():
    code, text = run("solve", "--eps", "0.01", "--d", "0.1", "--class", "fwd-kl")
    f = fields(text)
    assert code == 0
    assert float(f["p_out"]) == pytest.approx(0.080514523843720992, rel=1e-12)
    for key in ("s_star", "y_star", "regime", "lower_bound", "upper_bound", "approx_uncertainty", "approx_nominal"):
        assert key in f


def test_solve_lp():
    code, text = run("solve", "--eps", "0.01", "--d", "0.2", "--class", "lp", "--p", "1")
    assert code == 0 and float(fields(text)["p_out"]) == pytest.approx(0.11)
    assert run("solve", "--eps", "0.01", "--d", "0.2", "--class", "lp")[0] == 2


@pytest.mark.parametrize("argv", [
    ("solve", "--eps", "1.5", "--d", "0.1", "--class", "fwd-kl"),
    ("solve", "--eps", "0.1", "--d", "-1", "--class", "rev-kl"),
    ("solve", "--eps", "0.1", "--d", "0.1", "--class", "nope"),
    ("solve", "--eps", "abc", "--d", "0.1", "--class", "fwd-kl"),
    ("solve", "--eps", "0.1", "--d", "0.1", "--class", "fwd-kl", "--p", "2"),
    ("frobnicate",),
    (),
])
def test_usage_and_domain_errors_exit_2(argv, capsys):
    assert run(*argv)[0] == 2


# worst-case

def test_worst_case_forward():
    code, text = run("worst-case", "--eps", "0.01", "--d", "0.1", "--class", "fwd-kl")
    f = fields(text)
    assert code == 0
    assert float(f["ratio_outage"]) == pytest.approx(8.0514523843720992, rel=1e-10)
    assert float(f["ratio_clear"]) == pytest.approx(0.92877320823866572, rel=1e-10)
    assert abs(float(f["divergence"]) - 0.1) <= 1e-8
    assert "certificate: D(f*||f0)=" in text


def test_worst_case_reverse():
    code, text = run("worst-case", "--eps", "0.01", "--d", "0.1", "--class", "rev-kl")
    f = fields(text)
    assert float(f["ratio_outage"]) == pytest.approx(12.785628771317317, rel=1e-10)
    assert float(f["ratio_clear"]) == pytest.approx(0.88095324473416847, rel=1e-10)
    assert float(f["mass"]) == pytest.approx(1.0)


@pytest.mark.parametrize("cls", ["fwd-kl", "rev-kl"])
@pytest.mark.parametrize("eps", ["0.01", "0.5", "0.9"])
def test_worst_case_without_uncertainty(cls, eps):
    f = fields(run("worst-case", "--eps", eps, "--d", "0", "--class", cls)[1])
    assert (float(f["ratio_outage"]), float(f["ratio_clear"])) == (1.0, 1.0)


# sweep

def test_snr_range_is_inclusive():
    assert parse_snr_range("0:120:1") == [float(k) for k in range(121)]
    assert parse_snr_range("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_snr_range("5:5:1") == [5.0]


def test_sweep_csv_format_and_round_trip(tmp_path):
    path = tmp_path / "s.csv"
    code, _ = run("sweep", "--eps-model", "inverse-snr", "--d", "1e-3", "--snr-db", "0:120:1",
                  "--output", str(path))
    assert code == 0
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 122
    records = read_sweep_csv(io.StringIO(raw.decode()))
    assert [r.snr_db for r in records] == [float(k) for k in range(121)]
    expected = [cli.sweep_record(float(k), min(1.0, 10 ** (-k / 10)), 1e-3) for k in range(121)]
    for got, want in zip(records, expected):
        assert all(same(a, b) for a, b in zip(vars(got).values(), vars(want).values()))
    # rewriting parsed records reproduces the file byte for byte
    buf = io.StringIO()
    write_sweep_csv(records, buf)
    assert buf.getvalue() == raw.decode()


def test_sweep_prints_17_significant_digits():
    _, text = run("sweep", "--eps-model", "inverse-snr", "--d", "0.01", "--snr-db", "10:10:1")
    row = text.splitlines()[1].split(",")
    assert row[1] == "%.17g" % 0.1


def test_sweep_zero_radius_is_identity():
    _, text = run("sweep", "--eps-model", "siso-rayleigh", "--d", "0", "--snr-db", "0:40:5", "--rate", "1")
    for r in read_sweep_csv(io.StringIO(text)):
        assert r.p_fwd == r.eps and r.p_rev == r.eps


def test_sweep_parallel_rows_keep_order():
    a = run("sweep", "--eps-model", "inverse-snr", "--d", "0.1", "--snr-db", "0:60:0.5")[1]
    b = run("sweep", "--eps-model", "inverse-snr", "--d", "0.1", "--snr-db", "0:60:0.5", "--workers", "4")[1]
    assert a == b


def test_sweep_gnuplot_companion(tmp_path):
    csv_path, gp = tmp_path / "s.csv", tmp_path / "s.gp"
    code, _ = run("sweep", "--eps-model", "inverse-snr", "--d", "1e-3", "--snr-db", "0:20:10",
                  "--output", str(csv_path), "--gnuplot", str(gp))
    assert code == 0
    script = gp.read_text()
    assert str(csv_path) in script and "using 1:3" in script and "p_rev" in script
    assert run("sweep", "--eps-model", "inverse-snr", "--d", "0", "--gnuplot", str(gp))[0] == 2


def test_sweep_rejects_empty_range():
    assert run("sweep", "--eps-model", "inverse-snr", "--d", "0", "--snr-db", "5:0:1")[0] == 2
    assert run("sweep", "--eps-model", "inverse-snr", "--d", "0", "--snr-db", "0:5:0")[0] == 2


def test_sweep_record_invariants():
    with pytest.raises(Exception):
        SweepRecord(0.0, 0.5, 0.4, 0.6, math.nan, 0.5, 0.5, 1.0)
    with pytest.raises(Exception):
        SweepRecord(0.0, 0.5, 1.5, 0.6, math.nan, 0.5, 0.5, 1.0)


def test_mc_sweep_seed_from_environment(monkeypatch):
    argv = ("sweep", "--eps-model", "mc-mimo", "--d", "0.01", "--snr-db", "0:10:10", "--trials", "4000")
    a = run(*argv)[1]
    monkeypatch.setenv("ROBUST_OUTAGE_SEED", "0")
    assert run(*argv)[1] == a
    monkeypatch.setenv("ROBUST_OUTAGE_SEED", "7")
    assert run(*argv)[1] != a
    assert run(*argv, "--seed", "0")[1] == a


def test_mc_failure_exits_3(monkeypatch):
    def boom(*a, **k):
        raise MemoryError("no room for draws")

    monkeypatch.setattr(cli, "estimate_eps", boom)
    code, _ = run("sweep", "--eps-model", "mc-mimo", "--d", "0.01", "--snr-db", "0:10:10", "--trials", "10")
    assert code == 3


# capacity

def test_capacity_nominal_siso():
    code, text = run("capacity", "--delta", "0.1", "--d", "0", "--class", "nominal",
                     "--eps-model", "siso-rayleigh", "--snr-db", "10")
    f = fields(text)
    assert code == 0
    nats = float(f["capacity_nats"])
    assert nats == pytest.approx(0.71959686156612052, abs=1e-4)
    assert float(f["capacity_bits"]) == pytest.approx(nats / math.log(2), rel=1e-15)


def test_capacity_below_reverse_floor():
    argv = ("capacity", "--delta", "0.05", "--d", "0.1", "--class", "rev-kl", "--snr-db", "10")
    code, text = run(*argv)
    assert code == 0
    assert float(fields(text)["capacity_nats"]) == 0.0
    assert "notice:" in text and "floor" in text
    assert run(*argv, "--strict")[0] == 2


def test_capacity_bracket_top_is_explicit(capsys):
    code, _ = run("capacity", "--delta", "1", "--class", "nominal", "--snr-db", "10")
    assert code == 2
    assert "R_max" in capsys.readouterr().err


def test_capacity_reverse_reports_loss_bound():
    code, text = run("capacity", "--delta", "0.1", "--d", "0.001", "--class", "rev-kl", "--snr-db", "10")
    f = fields(text)
    assert code == 0
    assert float(f["capacity_nats"]) <= float(f["loss_upper_bound_nats"])


def test_capacity_nominal_rejects_radius():
    assert run("capacity", "--delta", "0.1", "--d", "0.1", "--class", "nominal", "--snr-db", "10")[0] == 2


def test_capacity_mc_mimo():
    code, text = run("capacity", "--delta", "0.1", "--class", "fwd-kl", "--d", "0.01",
                     "--eps-model", "mc-mimo", "--snr-db", "10", "--trials", "20000")
    assert code == 0 and float(fields(text)["capacity_nats"]) > 0.0


# check

def test_check_default_grid_passes():
    code, text = run("check")
    assert code == 0
    lines = text.splitlines()
    assert lines and all(line.startswith("PASS ") for line in lines)


def test_check_detects_perturbation():
    code, text = run("check", "--perturb", "1e-3")
    assert code == 1
    assert "FAIL" in text


def test_check_reverse_floor_row():
    code, text = run("check", "--class", "rev-kl", "--eps", "0")
    assert code == 0
    assert any(line.startswith("PASS reverse-floor-equality value=0.000e+00") for line in text.splitlines())


@pytest.mark.skipif(shutil.which("robust-outage") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["robust-outage", "solve", "--eps", "0.3", "--d", "0", "--class", "rev-kl"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "p_out=0.29999999999999999" in out.stdout
