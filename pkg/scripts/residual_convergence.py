"""Weighted-identity residual under h -> h/2, dt -> dt/4 refinement."""
import argparse

import numpy as np

from vortexflow.gl import Grid, build_well_prepared, heat_flow_step, weighted_identity_residual
from vortexflow.gl.stepping import stable_explicit_dt


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=0.2)
    ap.add_argument("--L", type=float, default=4.0)
    ap.add_argument("--q", type=float, default=1.0)
    ap.add_argument("--levels", type=int, nargs="+", default=[128, 256, 512])
    ap.add_argument("--method", choices=["strang", "rk4"], default="strang")
    args = ap.parse_args()
    finest = args.levels[-1]
    prev = None
    for N in args.levels:
        dt = stable_explicit_dt(Grid(args.L, finest)) * (finest / N) ** 2
        u = build_well_prepared([[args.q, 0], [-args.q, 0]], [1, -1], args.eps, Grid(args.L, N))
        r = weighted_identity_residual(u, heat_flow_step(u, dt, args.method), dt)
        norm = np.linalg.norm(r)
        print("N=%-4d dt=%.3e residual=%s norm=%.4e ratio=%s"
              % (N, dt, np.round(r, 6).tolist(), norm, "%.3f" % (prev / norm) if prev else "-"))
        prev = norm


if __name__ == "__main__":
    main()
