"""Direct scattering for the third-order spectral problem of the Newell system.

The x-part of the Lax pair reads X_x = (U + U1) X - X U with
U = diag(3ik, ik, -ik) and

        [ 0       sigma*conj(q)   2i r ]
    U1 =[ 2q      0               2q   ]
        [ 2i r    sigma*conj(q)   0    ]

Jost solutions are integrated in the interaction picture Y = e^{-xU} X e^{xU},
which turns the Volterra equation into Y_x = W(x, k) Y with W vanishing
outside the support of (q, r). With Y(x_lo) = I, s(k) = Y(x_hi)^{-1}.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline

from .pde import Field

log = logging.getLogger(__name__)

B_MATRIX = np.array([[0, 0, 1], [0, 1, 0], [1, 0, 0]], dtype=complex)

MAX_PHASE_PER_STEP = 0.3
S11_FLOOR = 1e-12
DECAY_LEVEL = 1e-8


class ScatteringError(RuntimeError):
    """Numerical failure in the direct scattering transform."""

    def __init__(self, message: str, k_values=()):
        k_values = [float(k) for k in np.atleast_1d(k_values)]
        if k_values:
            shown = ", ".join(f"{k:.4g}" for k in k_values[:10])
            more = f" (+{len(k_values) - 10} more)" if len(k_values) > 10 else ""
            message = f"{message} at k = [{shown}]{more}"
        super().__init__(message)
        self.k_values = k_values


class TruncationError(ScatteringError):
    pass


def metric_a(sigma: int) -> np.ndarray:
    return np.diag([1.0, -sigma / 2.0, 1.0]).astype(complex)


def u1_matrix(q, r, sigma: int) -> np.ndarray:
    """Potential matrix U1 sampled at each point, shape (..., 3, 3)."""
    q = np.asarray(q, dtype=complex)
    r = np.asarray(r, dtype=float)
    out = np.zeros(q.shape + (3, 3), dtype=complex)
    qb = sigma * q.conj()
    out[..., 0, 1] = qb
    out[..., 0, 2] = 2j * r
    out[..., 1, 0] = 2.0 * q
    out[..., 1, 2] = 2.0 * q
    out[..., 2, 0] = 2j * r
    out[..., 2, 1] = qb
    return out


def cofactor(m: np.ndarray) -> np.ndarray:
    """Cofactor matrix ((-1)^{i+j} minor_ij) of a stack of 3x3 matrices."""
    a, b, c = m[..., 0, :], m[..., 1, :], m[..., 2, :]
    return np.stack([np.cross(b, c), np.cross(c, a), np.cross(a, b)], axis=-2)


def fourier_refine(values: np.ndarray, factor: int) -> np.ndarray:
    """Band-limited (trigonometric) interpolation of periodic samples onto a grid `factor` times finer."""
    n = values.size
    if factor == 1:
        return values.astype(complex)
    spec = np.fft.fft(values)
    big = np.zeros(n * factor, dtype=complex)
    half = n // 2
    big[:half] = spec[:half]
    big[-half + 1 :] = spec[half + 1 :]
    big[half] = 0.5 * spec[half]
    big[-half] = 0.5 * spec[half]
    return np.fft.ifft(big) * factor


@dataclass(frozen=True, eq=False)
class LaxPotential:
    """(q, r) on the fine grid used for Jost integration.

    Samples are spaced ``dx`` = half the RK4 step, so node 2j is a step point
    and node 2j+1 its midpoint. The grid spans [x0, x0 + (n-1) dx].
    """

    x0: float
    dx: float
    q: np.ndarray
    r: np.ndarray
    sigma: int

    @property
    def n(self) -> int:
        return self.q.size

    @property
    def step(self) -> float:
        return 2.0 * self.dx

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def x_end(self) -> float:
        return self.x0 + self.dx * (self.n - 1)

    @cached_property
    def u1(self) -> np.ndarray:
        return u1_matrix(self.q, self.r, self.sigma)

    @cached_property
    def u1_norm(self) -> float:
        return float(np.abs(self.u1).sum(axis=-1).max()) if self.n else 0.0

    @classmethod
    def from_samples(cls, x0, dx, q, r, sigma):
        q = np.asarray(q, dtype=complex)
        r = np.asarray(r, dtype=float)
        if q.size % 2 == 0:
            # need an odd number of nodes (whole RK4 steps)
            q = np.append(q, 0.0)
            r = np.append(r, 0.0)
        return cls(float(x0), float(dx), q, r, int(sigma))

    @classmethod
    def from_field(
        cls,
        field: Field,
        max_step: float,
        truncation_tol: float = 1e-13,
        margin: float = 1.0,
    ) -> "LaxPotential":
        """Truncate ``field`` to its numerical support and refine it spectrally.

        The support is the smallest interval outside which |q| and |r| stay
        below ``truncation_tol``; it is widened by ``margin`` on each side.
        """
        amp = np.maximum(np.abs(field.q), np.abs(field.r))
        x = field.x
        above = np.nonzero(amp > truncation_tol)[0]
        if above.size == 0:
            return cls.from_samples(0.0, max_step / 2.0, np.zeros(3), np.zeros(3), field.sigma)
        pad = int(math.ceil(margin / field.dx))
        lo = above[0] - pad
        hi = above[-1] + pad
        if lo < 0 or hi >= field.n:
            raise TruncationError(
                f"potential does not decay below {truncation_tol:.0e} inside the domain"
                f" (max edge amplitude {max(amp[0], amp[-1]):.2e})"
            )
        factor = max(1, int(math.ceil(field.dx / (max_step / 2.0))))
        qf = fourier_refine(field.q, factor)
        rf = fourier_refine(field.r, factor).real
        start = lo * factor
        stop = hi * factor + 1
        if (stop - start) % 2 == 0:
            stop += 1
        return cls(
            x0=float(x[lo]),
            dx=field.dx / factor,
            q=qf[start:stop],
            r=rf[start:stop],
            sigma=field.sigma,
        )


def _interaction_matrix(q, r, e, sigma):
    """W = e^{-xU} U1 e^{xU} for a batch of k; ``e`` = exp(2ikx), shape (nk,)."""
    ei = 1.0 / e
    qb = sigma * np.conj(q)
    w = np.zeros(e.shape + (3, 3), dtype=complex)
    w[:, 0, 1] = qb * ei
    w[:, 0, 2] = 2j * r * ei * ei
    w[:, 1, 0] = 2.0 * q * e
    w[:, 1, 2] = 2.0 * q * ei
    w[:, 2, 0] = 2j * r * e * e
    w[:, 2, 1] = qb * e
    return w


def _integrate(potential: LaxPotential, ks: np.ndarray, adjoint: bool = False, track_det: bool = False):
    """RK4 for Y' = W Y (or Z' = -W^T Z when ``adjoint``) from x0 to x_end."""
    ks = np.asarray(ks, dtype=float)
    nk = ks.size
    y = np.broadcast_to(np.eye(3, dtype=complex), (nk, 3, 3)).copy()
    det_dev = np.zeros(nk)
    if potential.n < 3:
        return (y, det_dev) if track_det else y
    h = potential.step
    x = potential.x
    q, r, sigma = potential.q, potential.r, potential.sigma
    # only the support of the potential contributes
    active = np.maximum(np.abs(q), np.abs(r)) > 0

    def w_at(i):
        e = np.exp(2j * ks * x[i])
        w = _interaction_matrix(q[i], r[i], e, sigma)
        if adjoint:
            w = -np.swapaxes(w, -1, -2)
        return w

    w_next = w_at(0)
    for i in range(0, potential.n - 2, 2):
        if not (active[i] or active[i + 1] or active[i + 2]):
            w_next = None
            continue
        w0 = w_next if w_next is not None else w_at(i)
        wm = w_at(i + 1)
        w1 = w_at(i + 2)
        k1 = w0 @ y
        k2 = wm @ (y + 0.5 * h * k1)
        k3 = wm @ (y + 0.5 * h * k2)
        k4 = w1 @ (y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        w_next = w1
        if track_det:
            det_dev = np.maximum(det_dev, np.abs(np.linalg.det(y) - 1.0))
    return (y, det_dev) if track_det else y


def _check_step(potential: LaxPotential, ks) -> None:
    ks = np.atleast_1d(ks)
    if ks.size == 0 or potential.n < 3:
        return
    rate = max(4.0 * float(np.abs(ks).max()), potential.u1_norm)
    if rate * potential.step > MAX_PHASE_PER_STEP:
        bad = ks[np.maximum(4.0 * np.abs(ks), potential.u1_norm) * potential.step > MAX_PHASE_PER_STEP]
        raise ScatteringError(
            f"step {potential.step:.3g} too coarse (phase per step > {MAX_PHASE_PER_STEP})", bad
        )


def jost_minus(potential: LaxPotential, k: float, track_det: bool = False):
    """X_-(x_end, k): Jost solution normalised to I at the left truncation edge.

    With ``track_det`` also returns max |det X_- - 1| along the trajectory.
    """
    _check_step(potential, [k])
    y, dev = _integrate(potential, np.array([float(k)]), track_det=True)
    phase = np.exp(1j * k * potential.x_end * np.array([3.0, 1.0, -1.0]))
    x_end = phase[:, None] * y[0] / phase[None, :]
    return (x_end, float(dev[0])) if track_det else x_end


@dataclass(frozen=True, eq=False)
class SpectralPoint:
    k: float
    s: np.ndarray
    sA: np.ndarray
    r1: complex
    r2: complex


def _reflection(s, sA, ks):
    s11 = s[:, 0, 0]
    sA33 = sA[:, 2, 2]
    bad = np.abs(s11) < S11_FLOOR
    if np.any(bad):
        raise ScatteringError("|s11| below 1e-12 (reflection undefined; possible discrete spectrum)", ks[bad])
    bad = np.abs(sA33) < S11_FLOOR
    if np.any(bad):
        raise ScatteringError("|sA33| below 1e-12 (r2 undefined)", ks[bad])
    return s[:, 0, 1] / s11, sA[:, 2, 0] / sA33


def scattering_batch(potential: LaxPotential, ks, det_tol: float = 1e-8):
    """s, sA, r1, r2 for every k in ``ks`` (vectorised over k)."""
    ks = np.asarray(ks, dtype=float)
    _check_step(potential, ks)
    y = _integrate(potential, ks)
    s = np.linalg.inv(y)
    det_err = np.abs(np.linalg.det(s) - 1.0)
    bad = det_err > det_tol
    if np.any(bad):
        raise ScatteringError(f"|det s - 1| exceeds {det_tol:.1e}", ks[bad])
    sA = cofactor(s)
    r1, r2 = _reflection(s, sA, ks)
    return s, sA, r1, r2


def scattering_matrix(potential: LaxPotential, k: float, det_tol: float = 1e-8) -> SpectralPoint:
    s, sA, r1, r2 = scattering_batch(potential, [k], det_tol)
    return SpectralPoint(float(k), s[0], sA[0], complex(r1[0]), complex(r2[0]))


def adjoint_scattering(potential: LaxPotential, ks) -> np.ndarray:
    """sA(k) from an independent integration of the adjoint Jost solution X^A_-."""
    ks = np.asarray(ks, dtype=float)
    _check_step(potential, ks)
    z = _integrate(potential, ks, adjoint=True)
    return np.linalg.inv(z)


def born_reflection(field_or_potential, ks):
    """First-order (Born) reflection coefficients by trapezoid quadrature.

    r1 ~ -sigma int e^{-2ikx} conj(q) dx,  r2 ~ 2i int e^{-4ikx} r dx.
    """
    f = field_or_potential
    x = f.x
    ks = np.asarray(ks, dtype=float)
    ph = np.exp(-2j * np.outer(ks, x))
    r1 = -f.sigma * (ph @ np.conj(f.q)) * f.dx
    r2 = 2j * ((ph * ph) @ f.r) * f.dx
    return r1, r2


@dataclass(frozen=True)
class KGrid:
    """Symmetric k-grid: ``count`` uniform points on [k_min, k_max] and their mirror images."""

    k_min: float = 0.05
    k_max: float = 5.0
    count: int = 1000

    def validate(self) -> None:
        if not (0 < self.k_min < self.k_max):
            raise ValueError("need 0 < k_min < k_max")
        if self.count < 5:
            raise ValueError("need at least 5 points per side")

    def positive(self) -> np.ndarray:
        return np.linspace(self.k_min, self.k_max, self.count)

    def values(self) -> np.ndarray:
        pos = self.positive()
        return np.concatenate([-pos[::-1], pos])

    @property
    def spacing(self) -> float:
        return (self.k_max - self.k_min) / (self.count - 1)


@dataclass(frozen=True, eq=False)
class ScatteringTable:
    """Scattering data on a symmetric k-grid, k ascending.

    ``audit`` holds the numbers produced by :func:`audit_table` (empty for
    synthetic tables).
    """

    k: np.ndarray
    s: np.ndarray
    sA: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    sigma: int
    grid: KGrid
    audit: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.k.size

    def __getitem__(self, i) -> SpectralPoint:
        return SpectralPoint(float(self.k[i]), self.s[i], self.sA[i], complex(self.r1[i]), complex(self.r2[i]))

    @property
    def half(self) -> int:
        return self.k.size // 2

    @classmethod
    def from_reflection(cls, grid: KGrid, r1, r2, sigma: int) -> "ScatteringTable":
        """Table carrying prescribed reflection coefficients.

        s = [[1, r1, -r2], [0, 1, 0], [0, 0, 1]] has det 1 and reproduces
        r1 = s12/s11 and r2 = sA31/sA33; symmetries are not implied.
        """
        k = grid.values()
        r1 = np.broadcast_to(np.asarray(r1, dtype=complex), k.shape).copy()
        r2 = np.broadcast_to(np.asarray(r2, dtype=complex), k.shape).copy()
        s = np.broadcast_to(np.eye(3, dtype=complex), k.shape + (3, 3)).copy()
        s[:, 0, 1] = r1
        s[:, 0, 2] = -r2
        return cls(k, s, cofactor(s), r1, r2, sigma, grid, {"synthetic": True})

    @cached_property
    def _splines(self):
        h = self.half
        out = []
        for sl in (slice(0, h), slice(h, None)):
            kk = self.k[sl]
            out.append(
                tuple(CubicSpline(kk, part) for part in (self.r1[sl].real, self.r1[sl].imag, self.r2[sl].real, self.r2[sl].imag))
            )
        return out

    def covers(self, k: float) -> bool:
        return self.grid.k_min <= abs(k) <= self.grid.k_max

    def reflection_at(self, k: float) -> tuple[complex, complex]:
        """Cubic interpolation of r1, r2 (real and imaginary parts separately)."""
        k = float(k)
        if not self.covers(k):
            raise ValueError(
                f"k = {k:.6g} outside the table range |k| in [{self.grid.k_min}, {self.grid.k_max}]"
            )
        a, b, c, d = self._splines[0 if k < 0 else 1]
        return complex(a(k), b(k)), complex(c(k), d(k))


def _mirror(values: np.ndarray) -> np.ndarray:
    # value at -k for every grid k (grid is symmetric and ascending)
    return values[::-1]


def positivity(table: ScatteringTable) -> np.ndarray:
    """1 - 2 sigma |r1(-k)|^2 + |r2(k)|^2 on the grid."""
    return 1.0 - 2.0 * table.sigma * np.abs(_mirror(table.r1)) ** 2 + np.abs(table.r2) ** 2


def decay_threshold(k: np.ndarray, values: np.ndarray, level: float = DECAY_LEVEL) -> float | None:
    """Smallest K with |values| < level wherever |k| >= K (None if never)."""
    big = np.abs(values) >= level
    if not np.any(big):
        return float(np.abs(k).min())
    kmax_big = np.abs(k[big]).max()
    beyond = np.abs(k) > kmax_big
    if not np.any(beyond):
        return None
    return float(np.abs(k[beyond]).min())


def audit_table(
    table: ScatteringTable,
    potential: LaxPotential | None = None,
    det_tol: float = 1e-8,
    symmetry_tol: float = 1e-7,
    cofactor_tol: float = 1e-6,
    spot_checks: int = 50,
) -> dict:
    """Structural checks of a scattering table; returns a flat report."""
    s = table.s
    a = metric_a(table.sigma)
    a_inv = np.linalg.inv(a)
    det_err = float(np.abs(np.linalg.det(s) - 1.0).max())
    b_err = float(np.abs(_mirror(s) - B_MATRIX @ s @ B_MATRIX).max())
    s_inv = np.linalg.inv(s)
    a_err = float(np.abs(np.conj(np.swapaxes(s, -1, -2)) - a @ s_inv @ a_inv).max())
    cof_err = float(np.abs(table.sA - np.swapaxes(s_inv, -1, -2) * np.linalg.det(s)[:, None, None]).max())
    report = {
        "sigma": table.sigma,
        "n_k": len(table),
        "det_max_error": det_err,
        "det_tolerance": det_tol,
        "det_pass": det_err <= det_tol,
        "b_symmetry_error": b_err,
        "a_symmetry_error": a_err,
        "symmetry_tolerance": symmetry_tol,
        "b_symmetry_pass": b_err <= symmetry_tol,
        "a_symmetry_pass": a_err <= symmetry_tol,
        "cofactor_identity_error": cof_err,
    }
    if potential is not None and spot_checks > 0:
        idx = np.unique(np.linspace(0, len(table) - 1, spot_checks).round().astype(int))
        sA_indep = adjoint_scattering(potential, table.k[idx])
        spot = float(np.abs(sA_indep - table.sA[idx]).max())
        report.update(
            cofactor_spot_checks=int(idx.size),
            cofactor_spot_error=spot,
            cofactor_tolerance=cofactor_tol,
            cofactor_pass=spot <= cofactor_tol,
        )
    report.update(check_assumptions(table))
    report["k_decay_r1"] = decay_threshold(table.k, table.r1)
    report["k_decay_r2"] = decay_threshold(table.k, table.r2)
    report["symmetric_grid"] = bool(np.allclose(table.k, -_mirror(table.k), rtol=0, atol=1e-12))
    return report


def check_assumptions(table: ScatteringTable) -> dict:
    """Solitonless proxy (min |s11| on the real line) and the positivity condition."""
    pos = positivity(table)
    min_s11 = float(np.abs(table.s[:, 0, 0]).min())
    min_pos = float(pos.min())
    bad = table.k[pos <= 0]
    return {
        "min_abs_s11": min_s11,
        "min_positivity": min_pos,
        "assumption1_pass": bool(min_s11 > S11_FLOOR),
        "assumption2_pass": bool(min_pos > 0),
        "assumption2_violations": [float(k) for k in bad],
    }


@dataclass(frozen=True)
class ScatteringSettings:
    """Knobs of the table builder."""

    grid: KGrid = KGrid()
    phase_per_step: float = 0.1
    truncation_tol: float = 1e-13
    det_tol: float = 1e-8
    symmetry_tol: float = 1e-7
    cofactor_tol: float = 1e-6
    spot_checks: int = 50


def potential_for(field: Field, settings: ScatteringSettings) -> LaxPotential:
    g = settings.grid
    step = settings.phase_per_step / (4.0 * g.k_max)
    pot = LaxPotential.from_field(field, step, settings.truncation_tol)
    if pot.u1_norm * pot.step > MAX_PHASE_PER_STEP:
        step = settings.phase_per_step / pot.u1_norm
        pot = LaxPotential.from_field(field, step, settings.truncation_tol)
    return pot


def build_table(field: Field, settings: ScatteringSettings = ScatteringSettings(), audit: bool = True) -> ScatteringTable:
    """Scattering table of ``field`` on ``settings.grid`` with audit report attached."""
    settings.grid.validate()
    pot = potential_for(field, settings)
    ks = settings.grid.values()
    s, sA, r1, r2 = scattering_batch(pot, ks, settings.det_tol)
    table = ScatteringTable(ks, s, sA, r1, r2, field.sigma, settings.grid)
    if audit:
        report = audit_table(
            table,
            pot,
            det_tol=settings.det_tol,
            symmetry_tol=settings.symmetry_tol,
            cofactor_tol=settings.cofactor_tol,
            spot_checks=settings.spot_checks,
        )
        report.update(
            truncation_left=pot.x0,
            truncation_right=pot.x_end,
            jost_step=pot.step,
            field_time=field.t,
        )
        table.audit.update(report)
        if not report["assumption2_pass"]:
            warnings.warn(
                f"positivity condition fails at {len(report['assumption2_violations'])} grid points"
                f" (sigma={field.sigma})",
                stacklevel=2,
            )
    return table
