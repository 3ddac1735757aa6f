import dataclasses
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newell.pde import Field, SolverConfig, make_initial
from newell.scattering import (
    B_MATRIX,
    KGrid,
    LaxPotential,
    ScatteringError,
    ScatteringSettings,
    ScatteringTable,
    TruncationError,
    adjoint_scattering,
    audit_table,
    born_reflection,
    build_table,
    check_assumptions,
    cofactor,
    jost_minus,
    metric_a,
    potential_for,
    scattering_matrix,
)

CFG = SolverConfig(L=60.0, N=1024)


def gaussian_field(q_amp, r_amp, sigma=1, cfg=CFG):
    x = cfg.grid()
    g = np.exp(-(x**2) / 2)
    return Field(float(x[0]), cfg.dx, q_amp * g * np.exp(0.5j * x), r_amp * g, sigma=sigma)


def pot_for(field, k_max=3.0, phase_per_step=0.1):
    return potential_for(field, ScatteringSettings(grid=KGrid(0.05, k_max, 10), phase_per_step=phase_per_step))


def test_zero_potential_gives_identity():
    zero = gaussian_field(0.0, 0.0)
    pot = pot_for(zero)
    for k in (-2.0, 0.3, 4.0):
        assert np.array_equal(jost_minus(pot, k), np.eye(3))
        sp = scattering_matrix(pot, k)
        assert np.array_equal(sp.s, np.eye(3))
        assert sp.r1 == 0 and sp.r2 == 0


def test_zero_field_table_and_assumptions():
    tab = build_table(gaussian_field(0.0, 0.0), ScatteringSettings(grid=KGrid(0.05, 5.0, 50), spot_checks=5))
    assert np.array_equal(tab.s, np.broadcast_to(np.eye(3), tab.s.shape))
    rep = check_assumptions(tab)
    assert rep["min_abs_s11"] == 1.0 and rep["min_positivity"] == 1.0
    assert rep["assumption1_pass"] and rep["assumption2_pass"]
    assert tab.audit["det_pass"] and tab.audit["cofactor_pass"]


@pytest.mark.parametrize("sigma", [1, -1])
def test_det_along_trajectory(sigma):
    pot = pot_for(make_initial("paper-left", dataclasses.replace(CFG, sigma=sigma)), phase_per_step=0.05)
    for k in (-2.5, -0.4, 0.7, 3.0):
        _, dev = jost_minus(pot, k, track_det=True)
        assert dev < 1e-10


def _born_jost(pot, k):
    # I + e^{xU} (int W dx) e^{-xU}, W the interaction-picture potential
    u = np.array([3.0, 1.0, -1.0]) * k
    x = pot.x
    ph = np.exp(1j * np.subtract.outer(u, u)[..., None] * -x)  # e^{-x(u_i - u_j)}
    w = pot.u1.transpose(1, 2, 0) * ph
    integral = np.trapezoid(w, x, axis=-1)
    d = np.exp(1j * u * pot.x_end)
    return np.eye(3) + d[:, None] * integral / d[None, :]


def test_jost_born_term_quadratic():
    errs = []
    for eps in (1e-2, 5e-3, 2.5e-3):
        pot = pot_for(gaussian_field(eps, eps))
        errs.append(max(np.abs(jost_minus(pot, k) - _born_jost(pot, k)).max() for k in (-1.3, 0.6, 2.2)))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios > 3.5) & (ratios < 4.5)), ratios


@pytest.mark.parametrize("sigma", [1, -1])
def test_born_reflection_relative_error_halves(sigma):
    ks = np.linspace(0.2, 2.5, 12)
    ks = np.concatenate([-ks[::-1], ks])
    rel = []
    for eps in (1e-2, 5e-3, 2.5e-3):
        f = gaussian_field(eps, eps, sigma)
        pot = pot_for(f)
        r1 = np.array([scattering_matrix(pot, k).r1 for k in ks])
        r2 = np.array([scattering_matrix(pot, k).r2 for k in ks])
        b1, b2 = born_reflection(f, ks)
        rel.append((np.abs(r1 - b1).max() / np.abs(b1).max(), np.abs(r2 - b2).max() / np.abs(b2).max()))
    rel = np.array(rel)
    ratio = rel[:-1] / rel[1:]
    assert np.all((ratio > 1.7) & (ratio < 2.3)), ratio


def test_born_reflection_r2_phase_convention():
    # an off-centre long wave makes e^{+4ikx} and e^{-4ikx} distinguishable
    x = CFG.grid()
    f = Field(float(x[0]), CFG.dx, np.zeros_like(x), 1e-4 * np.exp(-((x - 1.5) ** 2) / 2))
    pot = pot_for(f)
    k = 0.8
    r2 = scattering_matrix(pot, k).r2
    born = 2j * np.trapezoid(np.exp(-4j * k * x) * f.r, x)
    wrong = 2j * np.trapezoid(np.exp(4j * k * x) * f.r, x)
    assert abs(r2 - born) < 1e-3 * abs(born)
    assert abs(r2 - wrong) > 0.5 * abs(born)


def test_paper_right_table_audits(right_table):
    a = right_table.audit
    assert a["det_max_error"] <= 1e-8
    assert a["b_symmetry_error"] <= 1e-7 and a["a_symmetry_error"] <= 1e-7
    assert a["cofactor_spot_error"] <= 1e-6
    assert a["assumption1_pass"] and a["assumption2_pass"]
    assert a["symmetric_grid"]
    # Schwartz decay beyond the recorded threshold
    kd = a["k_decay_r1"]
    assert kd is not None and kd < 5.0
    assert np.abs(right_table.r1[np.abs(right_table.k) >= kd]).max() < 1e-8
    # regression values of this table
    assert a["min_positivity"] == pytest.approx(0.67034, abs=1e-4)
    assert a["truncation_right"] == pytest.approx(8.6, abs=0.2)


def test_paper_left_assumptions():
    cfg = dataclasses.replace(CFG, N=2048)
    tab = build_table(make_initial("paper-left", cfg), ScatteringSettings(grid=KGrid(0.05, 5.0, 200), spot_checks=5))
    rep = check_assumptions(tab)
    assert rep["assumption1_pass"] and rep["assumption2_pass"]
    # regression values for this data set
    assert rep["min_abs_s11"] == pytest.approx(0.59494, abs=1e-4)
    assert rep["min_positivity"] == pytest.approx(0.91703, abs=1e-4)


def test_large_data_report_does_not_panic():
    f = gaussian_field(5.0, 5.0)
    settings_ = ScatteringSettings(grid=KGrid(0.05, 2.0, 40), spot_checks=0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        try:
            tab = build_table(f, settings_, audit=False)
        except ScatteringError as exc:
            assert len(exc.k_values) > 0
            return
    rep = check_assumptions(tab)
    assert set(rep) >= {"min_abs_s11", "min_positivity", "assumption1_pass", "assumption2_pass"}


def test_symmetries_pointwise(right_table):
    a = metric_a(1)
    i = 37
    s, s_mirror = right_table.s[i], right_table.s[len(right_table) - 1 - i]
    assert np.abs(s_mirror - B_MATRIX @ s @ B_MATRIX).max() < 1e-7
    assert np.abs(s.conj().T - a @ np.linalg.inv(s) @ np.linalg.inv(a)).max() < 1e-7


def test_cofactor_matches_adjoint_integration():
    f = make_initial("paper-right", CFG)
    pot = pot_for(f)
    ks = np.array([-1.7, 0.3, 2.9])
    s = np.array([scattering_matrix(pot, k).s for k in ks])
    assert np.abs(adjoint_scattering(pot, ks) - cofactor(s)).max() < 1e-6


def test_reflection_at_grid_point_and_range(right_table):
    i = right_table.half + 11
    r1, r2 = right_table.reflection_at(right_table.k[i])
    assert r1 == pytest.approx(right_table.r1[i], abs=1e-15)
    assert r2 == pytest.approx(right_table.r2[i], abs=1e-15)
    for bad in (0.0, 0.01, 5.5, -6.0):
        with pytest.raises(ValueError):
            right_table.reflection_at(bad)


def test_reflection_midpoint_against_direct(solver):
    grid = KGrid(0.05, 3.0, 600)
    settings_ = ScatteringSettings(grid=grid, spot_checks=0)
    f = make_initial("paper-right", solver)
    tab = build_table(f, settings_, audit=False)
    pot = potential_for(f, settings_)
    for j in (50, 301, 550):
        kmid = 0.5 * (tab.k[tab.half + j] + tab.k[tab.half + j + 1])
        direct = scattering_matrix(pot, kmid)
        r1, r2 = tab.reflection_at(kmid)
        assert abs(r1 - direct.r1) < 1e-6 and abs(r2 - direct.r2) < 1e-6


def test_truncation_error_when_field_fills_domain():
    f = gaussian_field(0.2, 0.1).replace(q=np.full(CFG.N, 1e-9 + 0j))
    with pytest.raises(TruncationError):
        pot_for(f)


def test_step_audit_rejects_coarse_potential():
    x = np.linspace(-5, 5, 101)
    pot = LaxPotential.from_samples(-5.0, 0.1, 0.1 * np.exp(-(x**2)), 0 * x, 1)
    with pytest.raises(ScatteringError) as info:
        scattering_matrix(pot, 4.0)
    assert 4.0 in info.value.k_values


def test_synthetic_table_carries_reflection():
    grid = KGrid(0.1, 2.0, 30)
    k = grid.values()
    tab = ScatteringTable.from_reflection(grid, 0.1 * np.exp(-k * k), 0.05j * k, 1)
    np.testing.assert_allclose(tab.s[:, 0, 1] / tab.s[:, 0, 0], tab.r1)
    np.testing.assert_allclose(tab.sA[:, 2, 0] / tab.sA[:, 2, 2], tab.r2)
    assert np.abs(np.linalg.det(tab.s) - 1).max() < 1e-15


@settings(max_examples=8, deadline=None)
@given(
    st.floats(0.01, 0.4),
    st.floats(0.01, 0.4),
    st.floats(-1.5, 1.5),
    st.sampled_from([1, -1]),
)
def test_structure_random_packets(q_amp, r_amp, center, sigma):
    cfg = dataclasses.replace(CFG, sigma=sigma)
    f = make_initial("custom", cfg, {"q_amp": q_amp, "r_amp": r_amp, "q_center": center, "q_wavenumber": 0.7})
    tab = build_table(f, ScatteringSettings(grid=KGrid(0.1, 3.0, 25), spot_checks=0), audit=False)
    rep = audit_table(tab, det_tol=1e-8, symmetry_tol=1e-7, spot_checks=0)
    assert rep["det_pass"] and rep["a_symmetry_pass"] and rep["b_symmetry_pass"]
