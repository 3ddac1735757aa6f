import dataclasses
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newell import io
from newell.asymptotics import AlphaSign, RegionBounds
from newell.config import CompareSpec, ConfigError, RunConfig
from newell.pde import Field, SolverConfig, make_initial
from newell.scattering import KGrid, ScatteringSettings


def test_snapshot_round_trip_is_bit_exact(tmp_path):
    cfg = SolverConfig(L=30.0, N=256, sigma=-1)
    f = make_initial("paper-left", cfg).replace(t=3.25)
    path = io.write_snapshot(tmp_path / "s.csv", f, {"L": cfg.L, "N": cfg.N, "dt": cfg.dt})
    assert path.read_text().splitlines()[0] == "x,re_q,im_q,r"
    g, meta = io.read_snapshot(path)
    assert np.array_equal(g.q, f.q) and np.array_equal(g.r, f.r) and np.array_equal(g.x, f.x)
    assert (g.t, g.sigma) == (3.25, -1)
    assert {"t", "L", "N", "dt", "sigma"} <= set(meta)


def test_table_round_trip(tmp_path, right_table):
    path = io.write_table(tmp_path / "t.csv", right_table, {"config_hash": "abc"})
    header = path.read_text().splitlines()[0].split(",")
    assert header[:3] == ["k", "re_s11", "im_s11"] and header[-4:] == ["re_r1", "im_r1", "re_r2", "im_r2"]
    assert len(header) == 23
    back = io.read_table(path)
    assert np.array_equal(back.s, right_table.s)
    assert np.array_equal(back.r1, right_table.r1) and np.array_equal(back.r2, right_table.r2)
    assert back.sigma == right_table.sigma


def test_wrong_header_rejected(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        io.read_snapshot(p)


def test_kv_round_trip(tmp_path):
    data = {"a": 1, "b": 2.5e-300, "c": "text = with equals", "d": [1.0, 2.0], "e": True, "f": None}
    io.write_kv(tmp_path / "kv.txt", data)
    assert io.read_kv(tmp_path / "kv.txt") == data


def test_atomic_write_keeps_old_file_on_failure(tmp_path, monkeypatch):
    target = tmp_path / "out.txt"
    io.atomic_write(target, "old\n")

    def boom(*a, **k):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        io.atomic_write(target, "new\n")
    assert target.read_text() == "old\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]


def test_default_config_round_trip():
    cfg = RunConfig()
    back = RunConfig.from_ini(cfg.to_ini())
    assert back == cfg
    assert back.config_hash() == cfg.config_hash()


@settings(max_examples=50, deadline=None)
@given(
    st.floats(1.0, 1e3),
    st.sampled_from([256, 1024, 8192]),
    st.floats(1e-4, 0.1),
    st.sampled_from([1, -1]),
    st.floats(0.01, 1.0),
    st.floats(1.5, 10.0),
    st.integers(10, 3000),
    st.floats(0.01, 0.5),
    st.one_of(st.none(), st.floats(2.0, 9.0)),
    st.sampled_from(list(AlphaSign)),
    st.lists(st.floats(0.5, 100.0), min_size=1, max_size=3),
)
def test_config_round_trip_lossless(L, N, dt, sigma, k_min, k_max, count, band, z2, sign, tvals):
    cfg = RunConfig(
        solver=SolverConfig(L=L, N=N, dt=dt, t_end=0.0),
        scattering=ScatteringSettings(grid=KGrid(k_min, k_max, count), phase_per_step=0.07),
        bounds=RegionBounds(boundary_band=band, zeta2_max=z2),
        compare=CompareSpec(t_values=tuple(tvals)),
        sigma=sigma,
        alpha_sign=sign,
        preset="paper-left",
    )
    back = RunConfig.from_ini(cfg.to_ini())
    assert back == cfg
    assert back.to_ini() == cfg.to_ini()


def test_hash_changes_with_content():
    a = RunConfig()
    b = RunConfig(solver=dataclasses.replace(a.solver, dt=1e-3))
    assert a.config_hash() != b.config_hash()


@pytest.mark.parametrize(
    "text",
    [
        "[solver]\ndt = 0\n",
        "[solver]\nN = 1000\n",
        "[run]\nsigma = 2\n",
        "[scattering]\nk_min = 3\nk_max = 2\n",
        "[scattering]\ncount = -5\n",
        "[asymptotics]\ntau_max = 1.5\n",
        "[compare]\nzeta_min = 2\nzeta_max = 1\n",
        "[solver]\ndt = abc\n",
        "[run]\npreset = nonsense\n",
        "not an ini file",
    ],
)
def test_invalid_configs_rejected(text):
    with pytest.raises(ConfigError):
        RunConfig.from_ini(text)


def test_field_edge_amplitude():
    x = np.linspace(-10, 10, 64, endpoint=False)
    f = Field(x[0], x[1] - x[0], np.exp(-(x**2)) + 0j, 0 * x)
    assert f.edge_amplitude() < 1e-20
