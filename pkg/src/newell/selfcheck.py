"""Property checks bundled with the CLI, plus reference oracles they rely on."""

from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import asymptotics as asy
from .pde import Field, SolverConfig, evolve, make_initial, plane_wave_frequency
from .scattering import KGrid, ScatteringSettings, ScatteringTable, born_reflection, build_table
from .specfun import complex_gamma


@dataclass(frozen=True)
class SyntheticProfile:
    """Smooth reflection data with closed-form |r1|^2, |r2|^2 and derivatives.

    r1(k) = a1 exp(-((k - c1)/w1)^2 + i k),  r2(k) = a2 exp(-((k - c2)/w2)^2 - i k/2).
    """

    a1: float = 0.3
    c1: float = 0.8
    w1: float = 0.7
    a2: float = 0.2
    c2: float = -0.5
    w2: float = 0.6

    def r1(self, k):
        return self.a1 * np.exp(-(((k - self.c1) / self.w1) ** 2) + 1j * k)

    def r2(self, k):
        return self.a2 * np.exp(-(((k - self.c2) / self.w2) ** 2) - 0.5j * k)

    def _abs2(self, which: int, k):
        a, c, w = (self.a1, self.c1, self.w1) if which == 1 else (self.a2, self.c2, self.w2)
        v = a * a * np.exp(-2.0 * ((k - c) / w) ** 2)
        return v, v * (-4.0 * (k - c) / (w * w))

    def g(self, j: int, s, sigma: int):
        """g_j(s) and dg_j/ds (same combinations as the asymptotic phase integrals)."""
        if j == 1:
            v, d = self._abs2(1, -s)
            return 1.0 - 2.0 * sigma * v, 2.0 * sigma * d
        if j == 2:
            v1, d1 = self._abs2(1, s)
            v2, d2 = self._abs2(2, -s)
            return 1.0 - 2.0 * sigma * v1 + v2, -2.0 * sigma * d1 - d2
        v1, d1 = self._abs2(1, -s)
        v2, d2 = self._abs2(2, s)
        return 1.0 - 2.0 * sigma * v1 + v2, 2.0 * sigma * d1 + d2

    def table(self, grid: KGrid, sigma: int) -> ScatteringTable:
        k = grid.values()
        return ScatteringTable.from_reflection(grid, self.r1(k), self.r2(k), sigma)


def brute_force_integral(profile: SyntheticProfile, sigma: int, j: int, lo: float, hi: float,
                         logs: list[tuple[float, float]], n: int) -> float:
    """Trapezoid rule for int sum c ln|s - a| g_j'/g_j ds after s = end +/- u^2 at both ends."""
    mid = 0.5 * (lo + hi)
    total = 0.0
    for end, sign in ((lo, 1.0), (hi, -1.0)):
        u = np.linspace(0.0, math.sqrt(abs(mid - end)), n)
        s = end + sign * u * u
        g, dg = profile.g(j, s, sigma)
        weight = np.zeros_like(s)
        with np.errstate(divide="ignore", invalid="ignore"):
            for c, a in logs:
                weight += c * np.log(np.abs(s - a))
            f = weight * dg / g * 2.0 * u
        f[~np.isfinite(f)] = 0.0  # u ln u -> 0 at the endpoint
        total += float(np.trapezoid(f, u))
    return total


def brute_force_s1(profile, sigma, k0, upper, n) -> complex:
    return brute_force_integral(profile, sigma, 1, k0, upper, [(1.0, -k0), (2.0, k0)], n) / (2j * math.pi)


def brute_force_s2(profile, sigma, k0, upper, n) -> complex:
    t1 = brute_force_integral(profile, sigma, 1, -k0, upper, [(2.0, -k0), (1.0, k0)], n)
    t2 = brute_force_integral(profile, sigma, 2, -upper, k0, [(1.0, k0), (1.0, -k0)], n)
    t3 = brute_force_integral(profile, sigma, 3, k0, -k0, [(2.0, k0), (1.0, -k0)], n)
    return (t1 + t2 + t3) / (2j * math.pi)


# --- checks -----------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _gamma_check(ctx) -> tuple[bool, str]:
    rng = np.random.default_rng(20240501)
    pts = rng.uniform(-10, 10, 200) + 1j * rng.uniform(-10, 10, 200)
    worst = 0.0
    for z in pts:
        if min(abs(z - n) for n in range(-11, 1)) < 1e-3:
            continue
        g = complex_gamma(z)
        worst = max(worst, abs(complex_gamma(z + 1) - z * g) / abs(z * g))
        worst = max(worst, abs(complex_gamma(z.conjugate()) - g.conjugate()) / abs(g))
        refl = g * complex_gamma(1 - z) * np.sin(np.pi * z) / np.pi
        worst = max(worst, abs(refl - 1))
    half = abs(complex_gamma(0.5) - math.sqrt(math.pi))
    ok = worst <= 1e-10 and half <= 1e-13
    return ok, f"worst identity rel err {worst:.2e}, |G(1/2)-sqrt(pi)| {half:.1e}"


def _table(ctx, kind: str, sigma: int) -> ScatteringTable:
    key = (kind, sigma)
    if key not in ctx["tables"]:
        solver = dataclasses.replace(ctx["solver"], sigma=sigma)
        try:
            ctx["tables"][key] = build_table(make_initial(kind, solver), ctx["settings"])
        except Exception as exc:  # remember the failure, later checks re-raise it
            ctx["tables"][key] = exc
    hit = ctx["tables"][key]
    if isinstance(hit, Exception):
        raise hit
    return hit


def _structure_check(ctx, what: str) -> tuple[bool, str]:
    parts, ok = [], True
    for kind in ctx["kinds"]:
        for sigma in (1, -1):
            a = _table(ctx, kind, sigma).audit
            if what == "det":
                good, val = a["det_pass"], a["det_max_error"]
            elif what == "symmetry":
                good = a["a_symmetry_pass"] and a["b_symmetry_pass"]
                val = max(a["a_symmetry_error"], a["b_symmetry_error"])
            else:
                good, val = a["cofactor_pass"], a["cofactor_spot_error"]
            ok &= bool(good)
            parts.append(f"{kind}/{sigma:+d}: {val:.1e}")
    return ok, "; ".join(parts)


def _born_check(ctx) -> tuple[bool, str]:
    grid = KGrid(0.1, 3.0, 100 if ctx["quick"] else 400)
    settings = dataclasses.replace(ctx["settings"], grid=grid, spot_checks=0)
    ks = grid.values()
    ratios = []
    for sigma in (1, -1):
        solver = dataclasses.replace(ctx["solver"], sigma=sigma)
        base = make_initial("paper-right", solver)
        errs = []
        for eps in (1e-2, 5e-3, 2.5e-3):
            f = base.replace(q=base.q * (eps / 0.2), r=base.r * (eps / 0.1))
            tab = build_table(f, settings, audit=False)
            b1, b2 = born_reflection(f, ks)
            errs.append((np.abs(tab.r1 - b1).max(), np.abs(tab.r2 - b2).max()))
        errs = np.array(errs)
        ratios += list((errs[:-1] / errs[1:]).ravel())
    ok = all(3.5 <= r <= 4.5 for r in ratios)
    return ok, "ratios " + ", ".join(f"{r:.3f}" for r in ratios)


def _modulus_check(ctx) -> tuple[bool, str]:
    tab = _table(ctx, "paper-right", 1)
    worst = 0.0
    for t in (25.0, 50.0):
        for zeta in np.linspace(1.2, 4.0, 15):
            ev = asy.q_asym(tab, zeta * t, t)
            worst = max(worst, abs(abs(ev.q_asym) * math.sqrt(2.0 * t / ev.nus.nu) - 1.0))
    return worst <= 1e-10, f"max | |q| sqrt(2t/nu) - 1 | = {worst:.1e}"


def _s1_oracle_check(ctx) -> tuple[bool, str]:
    prof = SyntheticProfile()
    grid = KGrid(0.02, 5.0, 1000)
    n = 10 * grid.count
    worst, unit = 0.0, 0.0
    for sigma in (1, -1):
        tab = prof.table(grid, sigma)
        for k0 in (0.1, 0.4, 1.1, 2.5):
            s1 = asy.compute_s1(tab, k0)
            worst = max(worst, abs(s1 - brute_force_s1(prof, sigma, k0, grid.k_max, n)))
            unit = max(unit, abs(abs(np.exp(s1)) - 1.0))
            s2 = asy.compute_s2(tab, -k0)
            worst = max(worst, abs(s2 - brute_force_s2(prof, sigma, -k0, grid.k_max, n)))
    return worst <= 1e-6 and unit <= 1e-9, f"max |s - s_ref| {worst:.1e}, max ||exp(s1)|-1| {unit:.1e}"


def _pde_check(ctx) -> tuple[bool, str]:
    cfg = SolverConfig(L=100.0, N=2048, dt=0.01, t_end=2.0 if ctx["quick"] else 25.0, snapshot_stride=100)
    snaps = evolve(make_initial("paper-right", cfg), cfg)
    m0 = snaps[0].long_wave_mass()
    drift = max(abs(s.long_wave_mass() - m0) for s in snaps) / abs(m0)
    # plane wave on a box holding an integer number of wavelengths
    kappa, amp, rho, sigma = 1.0, 0.3, 0.2, 1
    pw = SolverConfig(L=8 * math.pi, N=256, dt=1e-3, t_end=1.0, snapshot_stride=1000, sigma=sigma)
    x = pw.grid()
    f0 = Field(float(x[0]), pw.dx, amp * np.exp(1j * kappa * x), np.full_like(x, rho), sigma=sigma)
    f1 = evolve(f0, pw, check_edges=False)[-1]
    omega = -np.angle(np.vdot(f0.q, f1.q)) / f1.t
    expected = plane_wave_frequency(kappa, amp, rho, sigma)
    rel = abs(omega - expected) / abs(expected)
    return drift <= 1e-8 and rel <= 1e-6, f"mass drift {drift:.1e}, dispersion rel err {rel:.1e}"


CHECKS: list[tuple[str, Callable]] = [
    ("gamma identities", _gamma_check),
    ("det s = 1", lambda c: _structure_check(c, "det")),
    ("A/B symmetries", lambda c: _structure_check(c, "symmetry")),
    ("cofactor spot check", lambda c: _structure_check(c, "cofactor")),
    ("Born scaling", _born_check),
    ("modulus law", _modulus_check),
    ("s1/s2 oracle", _s1_oracle_check),
    ("PDE mass and dispersion", _pde_check),
]


def run_selfcheck(settings: ScatteringSettings, solver: SolverConfig, quick: bool = False) -> list[CheckResult]:
    """Run every check; a check raising an exception counts as failed."""
    if quick:
        settings = dataclasses.replace(settings, grid=KGrid(0.05, 5.0, 300), spot_checks=20)
    ctx = {
        "settings": settings,
        "solver": solver,
        "quick": quick,
        "kinds": ("paper-right",) if quick else ("paper-right", "paper-left"),
        "tables": {},
    }
    results = []
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            ok, detail = fn(ctx)
        except Exception as exc:  # report, don't abort the matrix
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail, time.perf_counter() - t0))
    return results
