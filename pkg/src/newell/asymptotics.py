"""Long-time asymptotics of q(x, t) in the four dispersive regions.

With zeta = x/t, tau = t/x and the stationary point k0 = (x - t)/(2t):

* Region I   (0 <= tau <= tau_max) and II (zeta in a compact subset of (1, inf))
  use r1(-k0), nu and the phase integral s1;
* Region III (zeta in a compact subset of (-inf, 1)) and IV (-tau_max <= tau <= 0)
  use alpha*(k0), nu, nu2 and s2.

The Stieltjes integrals int f(s) d ln g(s) are evaluated as int f g'/g ds
with g' from fourth-order differences on the table grid; g'/g is replaced by
its cubic spline and every ln|s - a| factor is integrated against the spline
pieces in closed form, so the endpoint singularities cost nothing.
"""

from __future__ import annotations

import cmath
import enum
import math
import weakref
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .scattering import ScatteringTable
from .specfun import complex_gamma

AMPLITUDE_FLOOR = 1e-12


class AsymptoticsError(ValueError):
    pass


class AmplitudeUndefined(AsymptoticsError):
    pass


class Region(enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    NEAR_BOUNDARY = "NearBoundary"


class AlphaSign(enum.Enum):
    """alpha(k) = r1*(-k) -/+ r1*(k) r2(k); the minus variant is the default."""

    THEOREM_MINUS = "theorem-minus"
    LEMMA_PLUS = "lemma-plus"


ERROR_ORDER = {
    Region.I: "O(x^-N + C_N(tau) ln x / x)",
    Region.II: "O(ln t / t)",
    Region.III: "O(ln t / t)",
    Region.IV: "O(|x|^-N + C_N(tau) ln|x| / |x|)",
    Region.NEAR_BOUNDARY: "not covered",
}


@dataclass(frozen=True)
class RegionBounds:
    """Region windows. II is [zeta2_min, zeta2_max], III is [zeta3_min, zeta3_max]."""

    tau_max: float = 0.1
    boundary_band: float = 0.1
    zeta2_max: float | None = None
    zeta3_min: float | None = None

    def validate(self) -> None:
        if not 0 < self.tau_max < 1:
            raise ValueError("tau_max must lie in (0, 1)")
        if not self.boundary_band > 0:
            raise ValueError("boundary_band must be positive")
        if self.zeta2[0] > self.zeta2[1] or self.zeta3[0] > self.zeta3[1]:
            raise ValueError("empty region window")

    @property
    def zeta2(self) -> tuple[float, float]:
        hi = self.zeta2_max if self.zeta2_max is not None else 1.0 / self.tau_max
        return 1.0 + self.boundary_band, hi

    @property
    def zeta3(self) -> tuple[float, float]:
        lo = self.zeta3_min if self.zeta3_min is not None else -1.0 / self.tau_max
        return lo, 1.0 - self.boundary_band


@dataclass(frozen=True)
class RegionTag:
    region: Region
    zeta: float
    tau: float
    k0: float
    x: float
    t: float


def classify(x: float, t: float, bounds: RegionBounds = RegionBounds()) -> RegionTag:
    x, t = float(x), float(t)
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0 and x == 0:
        raise ValueError("(x, t) = (0, 0) has no region")
    zeta = x / t if t > 0 else math.copysign(math.inf, x)
    tau = t / x if x != 0 else math.inf
    k0 = (x - t) / (2.0 * t) if t > 0 else math.copysign(math.inf, x)
    if 0.0 <= tau <= bounds.tau_max:
        region = Region.I
    elif -bounds.tau_max <= tau <= 0.0:
        region = Region.IV
    elif bounds.zeta2[0] <= zeta <= bounds.zeta2[1]:
        region = Region.II
    elif bounds.zeta3[0] <= zeta <= bounds.zeta3[1]:
        region = Region.III
    else:
        region = Region.NEAR_BOUNDARY
    return RegionTag(region, zeta, tau, k0, x, t)


@dataclass(frozen=True)
class NuFamily:
    nu: float
    nu1: float
    nu2: float
    nu3: float

    @property
    def nu_hat(self) -> float:
        return self.nu1 - self.nu2 + self.nu3


@dataclass
class AsymptoticEval:
    region: RegionTag
    nus: NuFamily | None
    s_corr: complex
    q_asym: complex
    r_error_order: str
    report: dict = field(default_factory=dict)


def _log_nu(dev: float, name: str) -> float:
    # -ln(1 + dev)/(2 pi); log1p keeps nu accurate when the reflection is tiny
    if not 1.0 + dev > 0:
        raise AsymptoticsError(f"logarithm argument of {name} is {1.0 + dev:.3e} <= 0 (positivity condition fails)")
    return -math.log1p(dev) / (2.0 * math.pi)


def nu_family(table: ScatteringTable, k0: float) -> NuFamily:
    sigma = table.sigma
    r1p, r2p = table.reflection_at(k0)
    r1m, r2m = table.reflection_at(-k0)
    a1p, a1m = abs(r1p) ** 2, abs(r1m) ** 2
    return NuFamily(
        nu=_log_nu(-2.0 * sigma * a1m, "nu"),
        nu1=_log_nu(-2.0 * sigma * a1p, "nu1"),
        nu2=_log_nu(-2.0 * sigma * a1p + abs(r2m) ** 2, "nu2"),
        nu3=_log_nu(-2.0 * sigma * a1m + abs(r2p) ** 2, "nu3"),
    )


def fd4_derivative(values: np.ndarray, spacing: float) -> np.ndarray:
    """Fourth-order finite-difference derivative on a uniform grid (one-sided at the ends)."""
    g = np.asarray(values, dtype=float)
    n = g.size
    if n < 5:
        raise ValueError("need at least 5 samples")
    d = np.empty(n)
    d[2:-2] = (g[:-4] - 8.0 * g[1:-3] + 8.0 * g[3:-1] - g[4:]) / 12.0
    d[0] = (-25.0 * g[0] + 48.0 * g[1] - 36.0 * g[2] + 16.0 * g[3] - 3.0 * g[4]) / 12.0
    d[1] = (-3.0 * g[0] - 10.0 * g[1] + 18.0 * g[2] - 6.0 * g[3] + g[4]) / 12.0
    d[-1] = (25.0 * g[-1] - 48.0 * g[-2] + 36.0 * g[-3] - 16.0 * g[-4] + 3.0 * g[-5]) / 12.0
    d[-2] = (3.0 * g[-1] + 10.0 * g[-2] - 18.0 * g[-3] + 6.0 * g[-4] - g[-5]) / 12.0
    return d / spacing


def _log_moment(u: np.ndarray, n: int) -> np.ndarray:
    # antiderivative of u^n ln|u|, zero at u = 0
    au = np.abs(u)
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = np.where(au > 0, np.log(np.where(au > 0, au, 1.0)), 0.0)
    return u ** (n + 1) / (n + 1) * (lg - 1.0 / (n + 1))


def log_weighted_integral(spline: CubicSpline, lo: float, hi: float, a: float) -> float:
    """Exact integral of ln|s - a| * spline(s) over [lo, hi] for a cubic spline."""
    if hi <= lo:
        return 0.0
    bp = spline.x
    inner = bp[(bp > lo) & (bp < hi)]
    edges = np.concatenate([[lo], inner, [hi]])
    left, right = edges[:-1], edges[1:]
    piece = np.clip(np.searchsorted(bp, 0.5 * (left + right)) - 1, 0, bp.size - 2)
    c = spline.c[:, piece]  # c[m] multiplies (s - bp)^(3 - m)
    b = a - bp[piece]  # s - bp = u + b with u = s - a
    # coefficients of the piece polynomial in powers of u
    c3, c2, c1, c0 = c[0], c[1], c[2], c[3]
    d0 = c0 + c1 * b + c2 * b**2 + c3 * b**3
    d1 = c1 + 2.0 * c2 * b + 3.0 * c3 * b**2
    d2 = c2 + 3.0 * c3 * b
    d3 = c3
    ul, ur = left - a, right - a
    total = 0.0
    for n, dn in enumerate((d0, d1, d2, d3)):
        total += float(np.sum(dn * (_log_moment(ur, n) - _log_moment(ul, n))))
    return total


def plain_integral(spline: CubicSpline, lo: float, hi: float) -> float:
    return float(spline.integrate(lo, hi)) if hi > lo else 0.0


class LogMeasures:
    """Splines of d/ds ln g_j(s) for the three determinant combinations.

    g1(s) = 1 - 2 sigma |r1(-s)|^2
    g2(s) = 1 - 2 sigma |r1(s)|^2 + |r2(-s)|^2
    g3(s) = 1 - 2 sigma |r1(-s)|^2 + |r2(s)|^2
    """

    def __init__(self, table: ScatteringTable):
        k = table.k
        h = table.half
        sigma = table.sigma
        a1 = np.abs(table.r1) ** 2
        a2 = np.abs(table.r2) ** 2
        a1m, a2m = a1[::-1], a2[::-1]
        self.g = {
            1: 1.0 - 2.0 * sigma * a1m,
            2: 1.0 - 2.0 * sigma * a1 + a2m,
            3: 1.0 - 2.0 * sigma * a1m + a2,
        }
        for j, g in self.g.items():
            if np.any(g <= 0):
                bad = k[g <= 0]
                raise AsymptoticsError(
                    f"ln g{j} undefined: argument <= 0 at {bad.size} grid points (first k = {bad[0]:.4g})"
                )
        dk = table.grid.spacing
        self.k = k
        self.k_max = float(table.grid.k_max)
        self.k_min = float(table.grid.k_min)
        self.dlog = {}
        for j, g in self.g.items():
            dg = np.concatenate([fd4_derivative(g[:h], dk), fd4_derivative(g[h:], dk)])
            self.dlog[j] = dg / g
        self._neg = {j: CubicSpline(k[:h], v[:h]) for j, v in self.dlog.items()}
        self._pos = {j: CubicSpline(k[h:], v[h:]) for j, v in self.dlog.items()}
        self._full = {j: CubicSpline(k, v) for j, v in self.dlog.items()}
        self.log_g_edge = {j: float(max(abs(math.log(g[0])), abs(math.log(g[-1])))) for j, g in self.g.items()}

    def spline(self, j: int, lo: float, hi: float) -> CubicSpline:
        if lo >= self.k_min:
            return self._pos[j]
        if hi <= -self.k_min:
            return self._neg[j]
        return self._full[j]

    def integral(self, j: int, lo: float, hi: float, logs: list[tuple[float, float]]) -> float:
        """int_lo^hi sum_c c ln|s - a| d ln g_j(s) over ``logs`` = [(c, a), ...]."""
        sp = self.spline(j, lo, hi)
        return sum(c * log_weighted_integral(sp, lo, hi, a) for c, a in logs)


_MEASURES: "weakref.WeakKeyDictionary[ScatteringTable, LogMeasures]" = weakref.WeakKeyDictionary()


def log_measures(table: ScatteringTable) -> LogMeasures:
    m = _MEASURES.get(table)
    if m is None:
        m = LogMeasures(table)
        _MEASURES[table] = m
    return m


def _check_k0(table: ScatteringTable, k0: float) -> None:
    if not table.covers(k0):
        raise AsymptoticsError(
            f"k0 = {k0:.6g} outside the table range |k| in [{table.grid.k_min}, {table.grid.k_max}]"
        )


def compute_s1(table: ScatteringTable, k0: float, details: dict | None = None) -> complex:
    """s1 = (1/2 pi i) int_{k0}^{inf} ln((s + k0)(s - k0)^2) d ln(1 - 2 sigma |r1(-s)|^2)."""
    if not k0 > 0:
        raise AsymptoticsError("s1 needs k0 > 0")
    _check_k0(table, k0)
    m = log_measures(table)
    upper = m.k_max
    val = m.integral(1, k0, upper, [(1.0, -k0), (2.0, k0)])
    if details is not None:
        details["s_truncation"] = upper
        details["s_tail_bound"] = math.log(2.0 * upper * (upper + k0) ** 2) * m.log_g_edge[1]
    return val / (2j * math.pi)


def compute_s2(table: ScatteringTable, k0: float, details: dict | None = None) -> complex:
    """Three-term phase integral of Regions III/IV (k0 < 0)."""
    if not k0 < 0:
        raise AsymptoticsError("s2 needs k0 < 0")
    _check_k0(table, k0)
    m = log_measures(table)
    upper = m.k_max
    t1 = m.integral(1, -k0, upper, [(2.0, -k0), (1.0, k0)])
    t2 = m.integral(2, -upper, k0, [(1.0, k0), (1.0, -k0)])
    t3 = m.integral(3, k0, -k0, [(2.0, k0), (1.0, -k0)])
    if details is not None:
        details["s2_terms"] = (t1 / (2j * math.pi), t2 / (2j * math.pi), t3 / (2j * math.pi))
        details["s_truncation"] = upper
        big = math.log(2.0 * upper * (upper - k0) ** 2)
        details["s_tail_bound"] = big * max(m.log_g_edge[1], m.log_g_edge[2])
    return (t1 + t2 + t3) / (2j * math.pi)


def alpha(table: ScatteringTable, k: float, sign: AlphaSign = AlphaSign.THEOREM_MINUS) -> complex:
    r1p, r2p = table.reflection_at(k)
    r1m, _ = table.reflection_at(-k)
    if sign is AlphaSign.THEOREM_MINUS:
        return r1m.conjugate() - r1p.conjugate() * r2p
    return r1m.conjugate() + r1p.conjugate() * r2p


def _leading_term(span: float, k0: float, nu: float, damping: float, s_corr: complex, denom: complex) -> complex:
    """sqrt(2 pi) (2 sqrt(T))^{-2 i nu} exp(i nu ln(2|k0|) + 3 pi i/4 + 2 i T k0^2 - pi nu/2 + damping + s) / (2 sqrt(T) denom Gamma(-i nu))."""
    root = math.sqrt(span)
    expo = (
        -2j * nu * math.log(2.0 * root)
        + 1j * nu * math.log(2.0 * abs(k0))
        + 0.75j * math.pi
        + 2j * span * k0 * k0
        - 0.5 * math.pi * nu
        + damping
        + s_corr
    )
    # 1/Gamma(-i nu) = -i nu / Gamma(1 - i nu) stays finite as nu -> 0
    inv_gamma = -1j * nu / complex_gamma(1.0 - 1j * nu)
    return math.sqrt(2.0 * math.pi) * cmath.exp(expo) * inv_gamma / (2.0 * root * denom)


def q_region_ii(table: ScatteringTable, x: float, t: float, details: dict | None = None) -> complex:
    """Region II formula in (x, t)."""
    k0 = (x - t) / (2.0 * t)
    return _q_positive_k0(table, k0, t, details)


def q_region_i(table: ScatteringTable, x: float, tau: float, details: dict | None = None) -> complex:
    """Region I formula in (x, tau): k0 = (1 - tau)/(2 tau), time scale x tau."""
    k0 = (1.0 - tau) / (2.0 * tau)
    return _q_positive_k0(table, k0, x * tau, details)


def _q_positive_k0(table, k0, span, details):
    _check_k0(table, k0)
    nus = nu_family(table, k0)
    r1m, _ = table.reflection_at(-k0)
    if abs(r1m) < AMPLITUDE_FLOOR:
        raise AmplitudeUndefined(f"|r1(-k0)| < {AMPLITUDE_FLOOR:g} at k0 = {k0:.6g}")
    s1 = compute_s1(table, k0, details)
    if details is not None:
        details.update(nus=nus, s_corr=s1)
    return _leading_term(span, k0, nus.nu, 0.0, s1, r1m)


def q_region_iii(table, x, t, sign=AlphaSign.THEOREM_MINUS, details=None) -> complex:
    k0 = (x - t) / (2.0 * t)
    return _q_negative_k0(table, k0, t, sign, details)


def q_region_iv(table, x, tau, sign=AlphaSign.THEOREM_MINUS, details=None) -> complex:
    k0 = (1.0 - tau) / (2.0 * tau)
    return _q_negative_k0(table, k0, x * tau, sign, details)


def _q_negative_k0(table, k0, span, sign, details):
    _check_k0(table, k0)
    nus = nu_family(table, k0)
    a = alpha(table, k0, sign)
    if abs(a) < AMPLITUDE_FLOOR:
        raise AmplitudeUndefined(f"|alpha(k0)| < {AMPLITUDE_FLOOR:g} at k0 = {k0:.6g}")
    s2 = compute_s2(table, k0, details)
    if details is not None:
        details.update(nus=nus, s_corr=s2, alpha=a)
    return _leading_term(span, k0, nus.nu, -math.pi * nus.nu2, s2, a.conjugate())


def q_asym(
    table: ScatteringTable,
    x: float,
    t: float,
    bounds: RegionBounds = RegionBounds(),
    alpha_sign: AlphaSign = AlphaSign.THEOREM_MINUS,
) -> AsymptoticEval:
    """Leading-order q(x, t) for the region containing (x, t)."""
    tag = classify(x, t, bounds)
    if tag.region is Region.NEAR_BOUNDARY:
        raise AsymptoticsError(f"(x, t) = ({x:g}, {t:g}) lies in the excluded band around zeta = 1")
    if tag.t == 0:
        raise AsymptoticsError("t = 0 has no stationary point (k0 infinite)")
    details: dict = {}
    if tag.region is Region.II:
        q = q_region_ii(table, x, t, details)
    elif tag.region is Region.I:
        q = q_region_i(table, x, tag.tau, details)
    elif tag.region is Region.III:
        q = q_region_iii(table, x, t, alpha_sign, details)
    else:
        q = q_region_iv(table, x, tag.tau, alpha_sign, details)
    nus = details.pop("nus")
    s_corr = details.pop("s_corr")
    return AsymptoticEval(tag, nus, s_corr, q, ERROR_ORDER[tag.region], details)


def asym_profile(
    table: ScatteringTable,
    t: float,
    x_range: tuple[float, float, int],
    bounds: RegionBounds = RegionBounds(),
    alpha_sign: AlphaSign = AlphaSign.THEOREM_MINUS,
) -> list[AsymptoticEval]:
    """Evaluate on ``count`` uniform x in [x_lo, x_hi].

    Boundary-band points and points with vanishing amplitude are kept with q = nan.
    """
    x_lo, x_hi, count = x_range
    out = []
    for x in np.linspace(x_lo, x_hi, int(count)) if count > 0 else []:
        tag = classify(x, t, bounds)
        if tag.region is Region.NEAR_BOUNDARY:
            out.append(AsymptoticEval(tag, None, complex("nan"), complex("nan"), ERROR_ORDER[tag.region]))
            continue
        try:
            out.append(q_asym(table, x, t, bounds, alpha_sign))
        except AmplitudeUndefined as exc:
            nan = complex("nan")
            out.append(AsymptoticEval(tag, None, nan, nan, ERROR_ORDER[tag.region], {"undefined": str(exc)}))
    return out


def nu_hat_residual(table: ScatteringTable, k0_values) -> np.ndarray:
    """|nu1 - nu2 + nu3 - nu| at each k0."""
    return np.array([abs(nu_family(table, k0).nu_hat - nu_family(table, k0).nu) for k0 in k0_values])
