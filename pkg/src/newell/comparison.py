"""Numerical |q| versus the leading-order asymptotic profile."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .asymptotics import (
    AlphaSign,
    AmplitudeUndefined,
    AsymptoticsError,
    Region,
    RegionBounds,
    classify,
    q_asym,
)
from .pde import Field
from .scattering import ScatteringTable
from .svg import Curve, line_plot, region_bands

REGION_COLORS = {"I": "#1f77b4", "II": "#2ca02c", "III": "#ff7f0e", "IV": "#9467bd", "NearBoundary": "#7f7f7f"}
NO_CONTENT = "no dispersive content"


class CompareError(ValueError):
    pass


@dataclass
class Comparison:
    t: float
    x: np.ndarray
    abs_num: np.ndarray
    abs_asym: np.ndarray
    regions: list[str]
    rel_err: np.ndarray
    note: str | None = None
    skipped: dict = field(default_factory=dict)

    def rows(self):
        for i in range(self.x.size):
            yield [repr(float(self.x[i])), repr(float(self.abs_num[i])), repr(float(self.abs_asym[i])),
                   self.regions[i], repr(float(self.rel_err[i]))]

    def stats(self, mask: np.ndarray) -> dict:
        e = self.rel_err[mask & np.isfinite(self.rel_err)]
        if e.size == 0:
            return {"count": 0, "max_rel_err": float("nan"), "median_rel_err": float("nan")}
        return {"count": int(e.size), "max_rel_err": float(e.max()), "median_rel_err": float(np.median(e))}

    def summary(self, zeta_window: tuple[float, float] | None = None) -> dict:
        out: dict = {"t": self.t, "points": int(self.x.size)}
        names = np.array(self.regions)
        for reg in ("I", "II", "III", "IV"):
            for key, val in self.stats(names == reg).items():
                out[f"region_{reg}_{key}"] = val
        if zeta_window is not None:
            lo, hi = zeta_window
            zeta = self.x / self.t
            for key, val in self.stats((zeta >= lo) & (zeta <= hi)).items():
                out[f"window_{key}"] = val
            out["window_zeta"] = [lo, hi]
        for key, val in self.skipped.items():
            out[f"skipped_{key}"] = val
        if self.note:
            out["note"] = self.note
        return out

    def svg(self, title: str) -> str:
        bands = region_bands(self.x, self.regions, REGION_COLORS)
        curves = [
            Curve("|q| numerical", self.x, self.abs_num, "black"),
            Curve("|q| asymptotic", self.x, self.abs_asym, "#d62728", "6,3"),
        ]
        return line_plot(curves, bands, title=title, xlabel="x", ylabel="|q|", note=self.note)


def compare(
    snapshot: Field,
    table: ScatteringTable,
    zeta_range: tuple[float, float],
    bounds: RegionBounds = RegionBounds(),
    alpha_sign: AlphaSign = AlphaSign.THEOREM_MINUS,
    max_points: int = 800,
) -> Comparison:
    """Evaluate both profiles on snapshot grid points with zeta in ``zeta_range``."""
    t = snapshot.t
    if not t > 0:
        raise CompareError("comparison needs a snapshot at t > 0")
    x = snapshot.x
    zeta = x / t
    sel = np.nonzero((zeta >= zeta_range[0]) & (zeta <= zeta_range[1]))[0]
    if sel.size == 0:
        raise CompareError("comparison window contains no grid points")
    stride = max(1, int(np.ceil(sel.size / max_points)))
    sel = sel[::stride]
    xs = x[sel]
    num = np.abs(snapshot.q[sel])
    asym = np.full(xs.size, np.nan)
    regions = []
    skipped = {"undefined": 0, "outside_table": 0}
    for i, xv in enumerate(xs):
        tag = classify(xv, t, bounds)
        regions.append(tag.region.value)
        if tag.region is Region.NEAR_BOUNDARY:
            continue
        try:
            asym[i] = abs(q_asym(table, xv, t, bounds, alpha_sign).q_asym)
        except AmplitudeUndefined:
            skipped["undefined"] += 1
        except AsymptoticsError:
            skipped["outside_table"] += 1
    if all(r == Region.NEAR_BOUNDARY.value for r in regions):
        raise CompareError("every point of the comparison window lies in the excluded band around zeta = 1")
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.abs(num - asym) / asym
    note = None
    if not np.any(np.isfinite(asym)) and skipped["undefined"] > 0:
        note = NO_CONTENT
    return Comparison(t, xs, num, asym, regions, rel, note, skipped)
