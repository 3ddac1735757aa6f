"""Pseudo-spectral solver for the transformed Newell system.

    i q_t + i q_x + q_xx / 2 + (2 r^2 - 2 sigma |q|^2 - i r_x) q = 0
    r_t + r_x + sigma (|q|^2)_x = 0

on a periodic box [-L, L). The linear parts are integrated exactly in
Fourier space and the remainder with a Lawson (integrating-factor) RK4.
"""

from __future__ import annotations

import dataclasses
import enum
import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

BLOWUP_LIMIT = 1e6
REALITY_TOL = 1e-10
EDGE_BAND = 8


class SolverError(RuntimeError):
    pass


class BlowUpError(SolverError):
    def __init__(self, step_index: int, t: float):
        super().__init__(f"blow-up detected at step {step_index} (t={t:.6g})")
        self.step_index = step_index
        self.t = t


class EdgeDecayError(SolverError):
    def __init__(self, t: float, edge_value: float, tolerance: float):
        super().__init__(
            f"edge decay violated at t={t:.6g}: max edge amplitude {edge_value:.3e} > {tolerance:.1e}"
            " (domain too small for the requested time)"
        )
        self.t = t
        self.edge_value = edge_value
        self.tolerance = tolerance


@dataclass
class SolverConfig:
    """Numerical knobs of the PDE solver.

    The box is [-L, L) with N points; ``snapshot_stride`` counts time steps.
    """

    L: float = 600.0
    N: int = 8192
    dt: float = 5e-3
    t_end: float = 25.0
    snapshot_stride: int = 1000
    sigma: int = 1
    edge_tolerance: float = 1e-10

    def validate(self) -> None:
        if not self.L > 0:
            raise ValueError(f"L must be positive, got {self.L}")
        if self.N < 256 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 256, got {self.N}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be non-negative, got {self.t_end}")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")
        if self.sigma not in (1, -1):
            raise ValueError(f"sigma must be +1 or -1, got {self.sigma}")
        if not self.edge_tolerance > 0:
            raise ValueError("edge_tolerance must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    def grid(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.N)


@dataclass
class Field:
    """Snapshot of (q, r) on a uniform periodic grid x = x0 + j dx."""

    x0: float
    dx: float
    q: np.ndarray
    r: np.ndarray
    t: float = 0.0
    sigma: int = 1

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=complex)
        r = np.asarray(self.r)
        if np.iscomplexobj(r):
            if r.size and np.max(np.abs(r.imag)) > REALITY_TOL:
                raise ValueError("long wave r must be real")
            r = r.real
        self.r = np.asarray(r, dtype=float)
        if self.q.shape != self.r.shape or self.q.ndim != 1:
            raise ValueError("q and r must be 1-d arrays of the same length")
        n = self.q.size
        if n < 2 or n & (n - 1):
            raise ValueError(f"grid length must be a power of two, got {n}")
        if self.sigma not in (1, -1):
            raise ValueError("sigma must be +1 or -1")

    @property
    def n(self) -> int:
        return self.q.size

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    def edge_amplitude(self, band: int = EDGE_BAND) -> float:
        a = np.maximum(np.abs(self.q), np.abs(self.r))
        return float(max(a[:band].max(), a[-band:].max()))

    def check_edges(self, tolerance: float) -> None:
        edge = self.edge_amplitude()
        if edge > tolerance:
            raise EdgeDecayError(self.t, edge, tolerance)

    def long_wave_mass(self) -> float:
        return float(np.sum(self.r) * self.dx)

    def replace(self, **changes) -> "Field":
        return dataclasses.replace(self, **changes)


class InitialKind(enum.Enum):
    PAPER_LEFT = "paper-left"
    PAPER_RIGHT = "paper-right"
    CUSTOM = "custom"


def _gaussian_data(x, params):
    def wave(prefix):
        amp = float(params.get(f"{prefix}_amp", 0.0))
        width = float(params.get(f"{prefix}_width", 1.0))
        center = float(params.get(f"{prefix}_center", 0.0))
        wavenumber = float(params.get(f"{prefix}_wavenumber", 0.0))
        phase = float(params.get(f"{prefix}_phase", 0.0))
        envelope = np.exp(-((x - center) ** 2) / (2.0 * width**2))
        return amp, envelope, wavenumber, phase, center

    a, env, kq, ph, c = wave("q")
    q = a * env * np.exp(1j * (kq * (x - c) + ph))
    a, env, kr, ph, c = wave("r")
    r = a * env * np.cos(kr * (x - c) + ph)
    return q, r


def make_initial(kind, config: SolverConfig, params: dict | None = None) -> Field:
    """Sample initial data on the solver grid.

    ``paper-left``:  r0 = 0.3 cos(x) exp(-x^2/2), q0 = 0.2 sin(x) exp(-x^2/2)
    ``paper-right``: r0 = 0.1 exp(-x^2/2),        q0 = 0.2 exp(-x^2/2)
    ``custom``: Gaussian packets, keys ``{q,r}_{amp,width,center,wavenumber,phase}``;
    q gets a carrier exp(i(kx+phase)), r a real cos(kx+phase).
    """
    kind = InitialKind(kind)
    config.validate()
    x = config.grid()
    gauss = np.exp(-(x**2) / 2.0)
    if kind is InitialKind.PAPER_LEFT:
        r = 0.3 * np.cos(x) * gauss
        q = 0.2 * np.sin(x) * gauss + 0j
    elif kind is InitialKind.PAPER_RIGHT:
        r = 0.1 * gauss
        q = 0.2 * gauss + 0j
    else:
        q, r = _gaussian_data(x, params or {})
    f = Field(x0=float(x[0]), dx=config.dx, q=q, r=r, t=0.0, sigma=config.sigma)
    f.check_edges(config.edge_tolerance)
    return f


class _Stepper:
    """Lawson RK4 on the Fourier coefficients (q via fft, r via rfft)."""

    def __init__(self, n: int, dx: float, sigma: int, dt: float):
        self.n = n
        self.sigma = sigma
        self.dt = dt
        self.xi = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
        self.xi_r = 2.0 * np.pi * np.fft.rfftfreq(n, d=dx)
        cutoff = (2.0 / 3.0) * np.abs(self.xi).max()
        self.mask = np.abs(self.xi) <= cutoff
        self.mask_r = np.abs(self.xi_r) <= cutoff
        lq = -1j * self.xi - 0.5j * self.xi**2
        lr = -1j * self.xi_r
        self.eq_half = np.exp(0.5 * dt * lq)
        self.eq_full = self.eq_half**2
        self.er_half = np.exp(0.5 * dt * lr)
        self.er_full = self.er_half**2

    def nonlinear(self, qh, rh):
        n = self.n
        q = np.fft.ifft(qh)
        r = np.fft.irfft(rh, n)
        r_x = np.fft.irfft(1j * self.xi_r * rh, n)
        intensity = (q * q.conj()).real
        nq = 1j * (2.0 * r**2 - 2.0 * self.sigma * intensity) * q + r_x * q
        nq_h = np.fft.fft(nq) * self.mask
        nr_h = -self.sigma * 1j * self.xi_r * np.fft.rfft(intensity) * self.mask_r
        return nq_h, nr_h

    def step(self, qh, rh):
        dt = self.dt
        eqh, eqf, erh, erf = self.eq_half, self.eq_full, self.er_half, self.er_full
        k1q, k1r = self.nonlinear(qh, rh)
        k2q, k2r = self.nonlinear(eqh * (qh + 0.5 * dt * k1q), erh * (rh + 0.5 * dt * k1r))
        k3q, k3r = self.nonlinear(eqh * qh + 0.5 * dt * k2q, erh * rh + 0.5 * dt * k2r)
        k4q, k4r = self.nonlinear(eqf * qh + dt * eqh * k3q, erf * rh + dt * erh * k3r)
        qh_new = eqf * qh + dt / 6.0 * (eqf * k1q + 2.0 * eqh * (k2q + k3q) + k4q)
        rh_new = erf * rh + dt / 6.0 * (erf * k1r + 2.0 * erh * (k2r + k3r) + k4r)
        return qh_new, rh_new


def _check_finite(q, r, step_index, t):
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(r))):
        raise BlowUpError(step_index, t)
    if np.abs(q).max() > BLOWUP_LIMIT or np.abs(r).max() > BLOWUP_LIMIT:
        raise BlowUpError(step_index, t)


def step(field: Field, dt: float) -> Field:
    """Advance one time step of size ``dt``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    stepper = _Stepper(field.n, field.dx, field.sigma, dt)
    qh, rh = stepper.step(np.fft.fft(field.q), np.fft.rfft(field.r))
    q = np.fft.ifft(qh)
    r = np.fft.irfft(rh, field.n)
    _check_finite(q, r, 1, field.t + dt)
    return field.replace(q=q, r=r, t=field.t + dt)


def evolve(initial: Field, config: SolverConfig, check_edges: bool = True) -> list[Field]:
    """Integrate from ``initial`` to ``config.t_end``.

    Returns snapshots every ``snapshot_stride`` steps, always including the
    initial and the final state.
    """
    config.validate()
    if initial.sigma != config.sigma:
        raise ValueError("field sigma does not match the solver config")
    n_steps = round((config.t_end - initial.t) / config.dt)
    if n_steps < 0 or abs(initial.t + n_steps * config.dt - config.t_end) > 1e-9 * max(1.0, config.t_end):
        raise ValueError("t_end - t0 must be a non-negative multiple of dt")
    if check_edges:
        initial.check_edges(config.edge_tolerance)
    snapshots = [initial]
    if n_steps == 0:
        return snapshots

    stepper = _Stepper(initial.n, initial.dx, initial.sigma, config.dt)
    qh = np.fft.fft(initial.q)
    rh = np.fft.rfft(initial.r)
    for j in range(1, n_steps + 1):
        with np.errstate(over="ignore", invalid="ignore"):  # overflow is caught by the blow-up check
            qh, rh = stepper.step(qh, rh)
        if j % config.snapshot_stride == 0 or j == n_steps:
            t = initial.t + j * config.dt
            q = np.fft.ifft(qh)
            r = np.fft.irfft(rh, initial.n)
            _check_finite(q, r, j, t)
            snap = initial.replace(q=q, r=r, t=t)
            if check_edges:
                snap.check_edges(config.edge_tolerance)
            snapshots.append(snap)
            log.debug("t=%.3f  max|q|=%.3e  max|r|=%.3e", t, np.abs(q).max(), np.abs(r).max())
        elif not (np.isfinite(qh.sum()) and np.isfinite(rh.sum())):
            raise BlowUpError(j, initial.t + j * config.dt)
    return snapshots


def plane_wave_frequency(kappa: float, amplitude: float, rho: float, sigma: int) -> float:
    """Dispersion relation of q = A exp(i(kappa x - omega t)), r = rho."""
    return kappa + 0.5 * kappa**2 - 2.0 * rho**2 + 2.0 * sigma * amplitude**2

