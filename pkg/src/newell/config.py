"""Run configuration: one INI-style file (``key = value`` under sections) per run."""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import io
from dataclasses import dataclass, field
from pathlib import Path

from .asymptotics import AlphaSign, RegionBounds
from .pde import SolverConfig
from .scattering import KGrid, ScatteringSettings


class ConfigError(ValueError):
    pass


@dataclass
class CompareSpec:
    """Comparison window in zeta = x/t, and the times compared."""

    t_values: tuple[float, ...] = (25.0,)
    zeta_min: float = -1.0
    zeta_max: float = 4.0
    summary_zeta2: tuple[float, float] = (1.5, 3.0)


@dataclass
class RunConfig:
    solver: SolverConfig = field(default_factory=SolverConfig)
    scattering: ScatteringSettings = field(default_factory=lambda: ScatteringSettings(phase_per_step=0.1))
    bounds: RegionBounds = field(default_factory=RegionBounds)
    compare: CompareSpec = field(default_factory=CompareSpec)
    preset: str = "paper-right"
    sigma: int = 1
    output_dir: str = "runs/default"
    alpha_sign: AlphaSign = AlphaSign.THEOREM_MINUS

    def __post_init__(self):
        self.solver.sigma = self.sigma

    def validate(self) -> None:
        try:
            self.solver.sigma = self.sigma
            self.solver.validate()
            self.scattering.grid.validate()
            self.bounds.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        s = self.scattering
        if not 0 < s.phase_per_step <= 0.3:
            raise ConfigError("phase_per_step must lie in (0, 0.3]")
        for name in ("truncation_tol", "det_tol", "symmetry_tol", "cofactor_tol"):
            if not getattr(s, name) > 0:
                raise ConfigError(f"{name} must be positive")
        c = self.compare
        if not c.zeta_min < c.zeta_max:
            raise ConfigError("compare: need zeta_min < zeta_max")
        if any(t <= 0 for t in c.t_values):
            raise ConfigError("compare: t values must be positive")
        if self.preset not in ("paper-left", "paper-right"):
            raise ConfigError(f"unknown preset {self.preset!r}")

    # serialisation -----------------------------------------------------

    def to_ini(self) -> str:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        solver = dataclasses.asdict(self.solver)
        solver.pop("sigma")
        cp["run"] = {
            "preset": self.preset,
            "sigma": str(self.sigma),
            "output_dir": self.output_dir,
            "alpha_sign": self.alpha_sign.value,
        }
        cp["solver"] = {k: repr(v) for k, v in solver.items()}
        s = self.scattering
        cp["scattering"] = {
            "k_min": repr(s.grid.k_min),
            "k_max": repr(s.grid.k_max),
            "count": repr(s.grid.count),
            "phase_per_step": repr(s.phase_per_step),
            "truncation_tol": repr(s.truncation_tol),
            "det_tol": repr(s.det_tol),
            "symmetry_tol": repr(s.symmetry_tol),
            "cofactor_tol": repr(s.cofactor_tol),
            "spot_checks": repr(s.spot_checks),
        }
        b = self.bounds
        cp["asymptotics"] = {
            "tau_max": repr(b.tau_max),
            "boundary_band": repr(b.boundary_band),
            "zeta2_max": "none" if b.zeta2_max is None else repr(b.zeta2_max),
            "zeta3_min": "none" if b.zeta3_min is None else repr(b.zeta3_min),
        }
        c = self.compare
        cp["compare"] = {
            "t_values": ", ".join(repr(float(t)) for t in c.t_values),
            "zeta_min": repr(c.zeta_min),
            "zeta_max": repr(c.zeta_max),
            "summary_zeta2": ", ".join(repr(float(z)) for z in c.summary_zeta2),
        }
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_ini(cls, text: str) -> "RunConfig":
        cp = configparser.ConfigParser()
        cp.optionxform = str
        try:
            cp.read_string(text)
            run = cp["run"] if cp.has_section("run") else {}
            cfg = cls()
            if "preset" in run:
                cfg.preset = run["preset"]
            if "sigma" in run:
                cfg.sigma = int(run["sigma"])
            if "output_dir" in run:
                cfg.output_dir = run["output_dir"]
            if "alpha_sign" in run:
                cfg.alpha_sign = AlphaSign(run["alpha_sign"])
            if cp.has_section("solver"):
                sec = cp["solver"]
                kw = {}
                for f in dataclasses.fields(SolverConfig):
                    if f.name in sec:
                        kw[f.name] = int(sec[f.name]) if f.name in ("N", "snapshot_stride") else float(sec[f.name])
                cfg.solver = dataclasses.replace(cfg.solver, **kw)
            if cp.has_section("scattering"):
                sec = cp["scattering"]
                g = cfg.scattering.grid
                grid = KGrid(
                    float(sec.get("k_min", g.k_min)), float(sec.get("k_max", g.k_max)), int(sec.get("count", g.count))
                )
                kw = {"grid": grid}
                for name in ("phase_per_step", "truncation_tol", "det_tol", "symmetry_tol", "cofactor_tol"):
                    if name in sec:
                        kw[name] = float(sec[name])
                if "spot_checks" in sec:
                    kw["spot_checks"] = int(sec["spot_checks"])
                cfg.scattering = dataclasses.replace(cfg.scattering, **kw)
            if cp.has_section("asymptotics"):
                sec = cp["asymptotics"]

                def opt(name, default):
                    if name not in sec:
                        return default
                    return None if sec[name].strip().lower() == "none" else float(sec[name])

                b = cfg.bounds
                cfg.bounds = RegionBounds(
                    tau_max=float(sec.get("tau_max", b.tau_max)),
                    boundary_band=float(sec.get("boundary_band", b.boundary_band)),
                    zeta2_max=opt("zeta2_max", b.zeta2_max),
                    zeta3_min=opt("zeta3_min", b.zeta3_min),
                )
            if cp.has_section("compare"):
                sec = cp["compare"]
                c = cfg.compare
                if "t_values" in sec:
                    c.t_values = tuple(float(v) for v in sec["t_values"].split(","))
                c.zeta_min = float(sec.get("zeta_min", c.zeta_min))
                c.zeta_max = float(sec.get("zeta_max", c.zeta_max))
                if "summary_zeta2" in sec:
                    lo, hi = (float(v) for v in sec["summary_zeta2"].split(","))
                    c.summary_zeta2 = (lo, hi)
        except (configparser.Error, KeyError, ValueError) as exc:
            raise ConfigError(f"invalid config: {exc}") from exc
        cfg.solver.sigma = cfg.sigma
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_ini(text)

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_ini().encode()).hexdigest()[:16]
