"""Median Region-II relative error of the asymptotic profile versus t.

One PDE run per sigma (paper-right data), compared at several times
against the t = 0 scattering table. The error should fall at least as fast as ln t / t.

    python3 scripts/error_vs_time.py [--times 10 20 30 40 50]
"""

import argparse
import dataclasses
import math

from newell.comparison import compare
from newell.pde import SolverConfig, evolve, make_initial
from newell.scattering import ScatteringSettings, build_table


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--times", type=float, nargs="+", default=[10.0, 20.0, 30.0, 40.0, 50.0])
    ap.add_argument("--zeta", type=float, nargs=2, default=[1.5, 3.0])
    args = ap.parse_args()
    dt = 5e-3
    stride = math.gcd(*(round(t / dt) for t in args.times))
    for sigma in (1, -1):
        cfg = SolverConfig(dt=dt, t_end=max(args.times), snapshot_stride=stride, sigma=sigma)
        snaps = {round(s.t, 6): s for s in evolve(make_initial("paper-right", cfg), cfg)}
        table = build_table(snaps[0.0], ScatteringSettings())
        print(f"sigma {sigma:+d}")
        print("     t   median    max    ln(t)/t")
        for t in args.times:
            s = compare(snaps[round(t, 6)], table, tuple(args.zeta)).summary(tuple(args.zeta))
            print(f"{t:6.1f}  {s['window_median_rel_err']:.4f}  {s['window_max_rel_err']:.4f}  {math.log(t) / t:.4f}")


if __name__ == "__main__":
    main()
