"""Command-line entry point: simulate | scatter | asym | compare | selfcheck."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from . import io
from .asymptotics import AsymptoticsError, asym_profile
from .comparison import CompareError, compare
from .config import ConfigError, RunConfig
from .pde import SolverError, evolve, make_initial
from .scattering import ScatteringError, build_table
from .selfcheck import run_selfcheck

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
AUDIT_FLAGS = ("det_pass", "a_symmetry_pass", "b_symmetry_pass", "cofactor_pass", "assumption1_pass")

log = logging.getLogger("newell")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI run configuration")
    common.add_argument("--preset", choices=["paper-left", "paper-right"])
    common.add_argument("--sigma", type=int, choices=[1, -1])
    common.add_argument("--t-end", type=float, dest="t_end")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--quick", action="store_true", help="smaller grids / subset of checks")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="newell", description="Newell long-wave/short-wave toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="run the PDE solver and write snapshots")

    sc = sub.add_parser("scatter", parents=[common], help="scattering table of a snapshot")
    sc.add_argument("--snapshot", type=Path, help="snapshot CSV (default: preset data at t=0)")
    sc.add_argument("--k-min", type=float)
    sc.add_argument("--k-max", type=float)
    sc.add_argument("--k-count", type=int)

    a = sub.add_parser("asym", parents=[common], help="asymptotic profile from a table")
    a.add_argument("--table", type=Path, required=True)
    a.add_argument("--t", type=float, required=True, dest="time")
    a.add_argument("--x-range", type=float, nargs=2, metavar=("LO", "HI"))
    a.add_argument("--count", type=int, default=400)

    c = sub.add_parser("compare", parents=[common], help="numerical vs asymptotic |q|")
    c.add_argument("--snapshot", type=Path, help="snapshot CSV (default: simulate to --t / --t-end)")
    c.add_argument("--table", type=Path, help="table CSV (default: built from preset data at t=0)")
    c.add_argument("--t", type=float, dest="time", help="required snapshot time")

    sub.add_parser("selfcheck", parents=[common], help="run the bundled property checks")
    return p


def resolve_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if args.preset:
        cfg.preset = args.preset
    if args.sigma is not None:
        cfg.sigma = args.sigma
    if args.t_end is not None:
        cfg.solver = dataclasses.replace(cfg.solver, t_end=args.t_end)
    if args.out is not None:
        cfg.output_dir = str(args.out)
    grid = cfg.scattering.grid
    over = {k: getattr(args, a, None) for k, a in (("k_min", "k_min"), ("k_max", "k_max"), ("count", "k_count"))}
    over = {k: v for k, v in over.items() if v is not None}
    if over:
        cfg.scattering = dataclasses.replace(cfg.scattering, grid=dataclasses.replace(grid, **over))
    cfg.validate()
    return cfg


def _prepare_out(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    io.atomic_write(out / "config.ini", cfg.to_ini())
    io.atomic_write(out / "config.sha256", cfg.config_hash() + "\n")
    return out


def _meta(cfg: RunConfig, **extra) -> dict:
    return {"config_hash": cfg.config_hash(), **extra}


def _snapshot_name(t: float) -> str:
    return f"snapshot_t{t:09.3f}.csv"


def _simulate(cfg: RunConfig, out: Path | None):
    solver = cfg.solver
    snaps = evolve(make_initial(cfg.preset, solver), solver)
    paths = []
    if out is not None:
        for s in snaps:
            meta = _meta(cfg, L=solver.L, N=solver.N, dt=solver.dt, preset=cfg.preset)
            paths.append(io.write_snapshot(out / "snapshots" / _snapshot_name(s.t), s, meta))
    return snaps, paths


def _table_for(cfg: RunConfig, field):
    return build_table(field, cfg.scattering)


def cmd_simulate(cfg: RunConfig) -> int:
    out = _prepare_out(cfg)
    snaps, paths = _simulate(cfg, out)
    print(f"wrote {len(paths)} snapshot(s) to {out / 'snapshots'} (t = {snaps[0].t:g} .. {snaps[-1].t:g})")
    return EXIT_OK


def cmd_scatter(cfg: RunConfig, snapshot: Path | None) -> int:
    out = _prepare_out(cfg)
    if snapshot is not None:
        field, _ = io.read_snapshot(snapshot)
    else:
        field = make_initial(cfg.preset, cfg.solver)
    field.check_edges(cfg.solver.edge_tolerance)
    table = _table_for(cfg, field)
    io.write_table(out / "table.csv", table, _meta(cfg, field_time=field.t))
    io.write_kv(out / "audit.txt", {**table.audit, "config_hash": cfg.config_hash()})
    failed = [f for f in AUDIT_FLAGS if not table.audit.get(f, True)]
    print(f"table: {len(table)} k-points, det err {table.audit['det_max_error']:.2e}, "
          f"min positivity {table.audit['min_positivity']:.3f}")
    if failed:
        print("audit failures: " + ", ".join(failed))
        return EXIT_CHECK
    return EXIT_OK


def cmd_asym(cfg: RunConfig, table_path: Path, t: float, x_range, count: int) -> int:
    out = _prepare_out(cfg)
    table = io.read_table(table_path)
    if x_range is None:
        x_range = (cfg.compare.zeta_min * t, cfg.compare.zeta_max * t)
    evals = asym_profile(table, t, (x_range[0], x_range[1], count), cfg.bounds, cfg.alpha_sign)
    rows = []
    for ev in evals:
        tag = ev.region
        nu = ev.nus.nu if ev.nus is not None else float("nan")
        q = ev.q_asym
        rows.append([repr(tag.x), repr(t), tag.region.value, repr(tag.zeta), repr(tag.k0), repr(nu),
                     repr(q.real), repr(q.imag), repr(abs(q))])
    io.write_rows(out / "profile.csv", io.PROFILE_HEADER, rows, _meta(cfg, t=t))
    regions = [ev.region.region.value for ev in evals]
    trunc = [ev.report.get("s_truncation") for ev in evals if "s_truncation" in ev.report]
    tails = [ev.report.get("s_tail_bound") for ev in evals if "s_tail_bound" in ev.report]
    report = {
        "t": t,
        "x_range": list(x_range),
        "points": len(evals),
        **{f"count_{r}": regions.count(r) for r in ("I", "II", "III", "IV", "NearBoundary")},
        "alpha_sign": cfg.alpha_sign.value,
        "s_truncation": max(trunc) if trunc else None,
        "s_tail_bound_max": max(tails) if tails else None,
        "error_orders": sorted({ev.r_error_order for ev in evals}),
        "undefined_points": sum("undefined" in ev.report for ev in evals),
        "table_sigma": table.sigma,
        "config_hash": cfg.config_hash(),
    }
    audit_file = table_path.parent / "audit.txt"
    if audit_file.exists():
        audit = io.read_kv(audit_file)
        report.update({f"audit_{k}": audit[k] for k in AUDIT_FLAGS + ("assumption2_pass",) if k in audit})
    io.write_kv(out / "report.txt", report)
    print(f"wrote {len(rows)} profile points to {out / 'profile.csv'}")
    return EXIT_OK


def cmd_compare(cfg: RunConfig, snapshot: Path | None, table_path: Path | None, t: float | None) -> int:
    out = _prepare_out(cfg)
    if snapshot is not None:
        field, _ = io.read_snapshot(snapshot)
        if t is not None and abs(field.t - t) > 1e-9 * max(1.0, t):
            raise ConfigError(f"snapshot time {field.t:g} does not match requested t = {t:g}")
    else:
        t = t if t is not None else cfg.solver.t_end
        cfg.solver = dataclasses.replace(cfg.solver, t_end=t, snapshot_stride=10**9)
        field = _simulate(cfg, None)[0][-1]
    if table_path is not None:
        table = io.read_table(table_path)
    else:
        table = _table_for(cfg, make_initial(cfg.preset, cfg.solver))
    if table.sigma != field.sigma:
        raise ConfigError("table and snapshot have different sigma")
    cmp = compare(field, table, (cfg.compare.zeta_min, cfg.compare.zeta_max), cfg.bounds, cfg.alpha_sign)
    meta = _meta(cfg, t=field.t)
    io.write_rows(out / "comparison.csv", io.COMPARE_HEADER, cmp.rows(), meta)
    title = f"|q| at t = {field.t:g}, sigma = {field.sigma:+d} ({cfg.preset})"
    io.atomic_write(out / "comparison.svg", cmp.svg(title))
    summary = cmp.summary(cfg.compare.summary_zeta2)
    summary["config_hash"] = cfg.config_hash()
    io.write_kv(out / "summary.txt", summary)
    if cmp.note:
        print(cmp.note)
    for reg in ("I", "II", "III", "IV"):
        n = summary[f"region_{reg}_count"]
        if n:
            print(f"region {reg:>3}: {n:4d} pts  median rel err {summary[f'region_{reg}_median_rel_err']:.4f}"
                  f"  max {summary[f'region_{reg}_max_rel_err']:.4f}")
    return EXIT_OK


def cmd_selfcheck(cfg: RunConfig, quick: bool) -> int:
    results = run_selfcheck(cfg.scattering, cfg.solver, quick=quick)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.seconds:6.1f}s  {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "scatter":
            return cmd_scatter(cfg, args.snapshot)
        if args.command == "asym":
            return cmd_asym(cfg, args.table, args.time, args.x_range, args.count)
        if args.command == "compare":
            return cmd_compare(cfg, args.snapshot, args.table, args.time)
        return cmd_selfcheck(cfg, args.quick)
    except (SolverError, ScatteringError, AsymptoticsError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, CompareError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
