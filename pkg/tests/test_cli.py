import time

import numpy as np
import pytest

from newell import io
from newell.cli import main
from newell.pde import Field

SMALL_INI = """
[solver]
L = 120.0
N = 2048
dt = 0.01
snapshot_stride = 500

[scattering]
count = 120
spot_checks = 5
"""


@pytest.fixture
def small_config(tmp_path):
    p = tmp_path / "small.ini"
    p.write_text(SMALL_INI)
    return p


def _grid():
    return -120.0 + 240.0 / 2048 * np.arange(2048)


def _zero_snapshot(path, t=0.0):
    x = _grid()
    return io.write_snapshot(path, Field(x[0], x[1] - x[0], np.zeros(x.size), np.zeros(x.size), t=t))


def test_simulate_initial_only(tmp_path, small_config):
    out = tmp_path / "run"
    assert main(["simulate", "--config", str(small_config), "--t-end", "0", "--out", str(out)]) == 0
    snaps = sorted((out / "snapshots").glob("*.csv"))
    assert len(snaps) == 1
    meta = io.read_kv(io.sidecar_path(snaps[0]))
    assert {"t", "L", "N", "dt", "sigma", "config_hash"} <= set(meta)
    assert (out / "config.ini").exists()


def test_simulate_writes_snapshots_through_t_end(tmp_path, small_config):
    out = tmp_path / "run"
    rc = main(["simulate", "--config", str(small_config), "--preset", "paper-right", "--sigma", "1",
               "--t-end", "10", "--out", str(out)])
    assert rc == 0
    times = sorted(io.read_kv(io.sidecar_path(p))["t"] for p in (out / "snapshots").glob("*.csv"))
    assert times == [0.0, 5.0, 10.0]


def test_invalid_dt_is_config_error(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[solver]\ndt = -0.1\n")
    assert main(["simulate", "--config", str(bad), "--out", str(tmp_path / "x")]) == 2


def test_missing_config_file(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "nope.ini")]) == 2


def test_scatter_zero_snapshot(tmp_path, small_config):
    snap = _zero_snapshot(tmp_path / "zero.csv")
    out = tmp_path / "tab"
    assert main(["scatter", "--config", str(small_config), "--snapshot", str(snap), "--out", str(out)]) == 0
    tab = io.read_table(out / "table.csv")
    assert np.array_equal(tab.s, np.broadcast_to(np.eye(3), tab.s.shape))
    audit = io.read_kv(out / "audit.txt")
    assert audit["det_pass"] and audit["assumption2_pass"]
    assert "config_hash" in io.read_kv(io.sidecar_path(out / "table.csv"))


def test_scatter_edge_contamination(tmp_path, small_config):
    x = _grid()
    snap = io.write_snapshot(tmp_path / "e.csv", Field(x[0], x[1] - x[0], 0.2 * np.exp(-x * x) + 1e-6, 0 * x))
    assert main(["scatter", "--config", str(small_config), "--snapshot", str(snap), "--out", str(tmp_path / "o")]) == 3


def test_scatter_is_deterministic(tmp_path, small_config):
    outs = []
    for name in ("a", "b"):
        assert main(["scatter", "--config", str(small_config), "--out", str(tmp_path / name)]) == 0
        outs.append((tmp_path / name / "table.csv").read_bytes())
    assert outs[0] == outs[1]


def test_asym_and_compare_pipeline(tmp_path, small_config):
    cfg = ["--config", str(small_config)]
    assert main(["scatter", *cfg, "--out", str(tmp_path / "tab")]) == 0
    table = tmp_path / "tab" / "table.csv"
    assert main(["asym", *cfg, "--table", str(table), "--t", "10", "--out", str(tmp_path / "asym")]) == 0
    prof = (tmp_path / "asym" / "profile.csv").read_text().splitlines()
    assert prof[0] == "x,t,region,zeta,k0,nu,re_q_asym,im_q_asym,abs_q_asym"
    report = io.read_kv(tmp_path / "asym" / "report.txt")
    assert report["count_II"] > 0 and report["audit_det_pass"] is True

    assert main(["simulate", *cfg, "--t-end", "10", "--out", str(tmp_path / "sim")]) == 0
    snap = next(p for p in (tmp_path / "sim" / "snapshots").glob("*.csv") if "10.000" in p.name)
    out = tmp_path / "cmp"
    assert main(["compare", *cfg, "--snapshot", str(snap), "--table", str(table), "--t", "10", "--out", str(out)]) == 0
    rows = (out / "comparison.csv").read_text().splitlines()
    assert rows[0] == "x,abs_q_numeric,abs_q_asym,region,rel_err"
    svg = (out / "comparison.svg").read_text()
    assert svg.startswith("<svg") and "<polyline" in svg and "fill-opacity" in svg
    summary = io.read_kv(out / "summary.txt")
    assert summary["region_II_count"] > 0
    assert summary["region_II_median_rel_err"] < 0.3
    assert "config_hash" in io.read_kv(io.sidecar_path(out / "comparison.csv"))


def test_compare_zero_field(tmp_path, small_config, capsys):
    cfg = ["--config", str(small_config)]
    snap0 = _zero_snapshot(tmp_path / "z0.csv")
    snap = _zero_snapshot(tmp_path / "z25.csv", t=25.0)
    assert main(["scatter", *cfg, "--snapshot", str(snap0), "--out", str(tmp_path / "tab")]) == 0
    out = tmp_path / "cmp"
    rc = main(["compare", *cfg, "--snapshot", str(snap), "--table", str(tmp_path / "tab" / "table.csv"),
               "--out", str(out)])
    assert rc == 0
    assert "no dispersive content" in capsys.readouterr().out
    assert "no dispersive content" in (out / "comparison.svg").read_text()


def test_compare_time_mismatch(tmp_path, small_config):
    snap = _zero_snapshot(tmp_path / "z.csv", t=25.0)
    assert main(["scatter", "--config", str(small_config), "--snapshot", str(_zero_snapshot(tmp_path / "z0.csv")),
                 "--out", str(tmp_path / "tab")]) == 0
    rc = main(["compare", "--config", str(small_config), "--snapshot", str(snap),
               "--table", str(tmp_path / "tab" / "table.csv"), "--t", "30", "--out", str(tmp_path / "c")])
    assert rc == 2


def test_compare_missing_input(tmp_path, small_config):
    rc = main(["compare", "--config", str(small_config), "--snapshot", str(tmp_path / "none.csv"),
               "--out", str(tmp_path / "c")])
    assert rc == 2


def test_selfcheck_quick_passes_within_budget(capsys):
    t0 = time.perf_counter()
    assert main(["selfcheck", "--quick"]) == 0
    assert time.perf_counter() - t0 < 60
    out = capsys.readouterr().out
    assert out.count("PASS") == 8 and "FAIL" not in out


def test_selfcheck_tampered_det_tolerance(tmp_path, capsys):
    p = tmp_path / "tamper.ini"
    p.write_text("[scattering]\ndet_tol = 1e-30\n")
    assert main(["selfcheck", "--quick", "--config", str(p)]) == 1
    out = capsys.readouterr().out
    assert any(line.startswith("FAIL") and "det s = 1" in line for line in out.splitlines())
