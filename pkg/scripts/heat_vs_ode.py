"""Tracked heat-flow vortices against the rescaled gradient ODE."""
import argparse

import numpy as np

from vortexflow.gl import Grid, compare_to_ode


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", type=float, default=0.5)
    ap.add_argument("--eps", type=float, default=0.05)
    ap.add_argument("--L", type=float, default=3.0)
    ap.add_argument("--N", type=int, default=512)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--horizon", type=float, default=0.1, help="ODE time")
    ap.add_argument("--flow", choices=["heat", "gp"], default="heat")
    args = ap.parse_args()
    rep = compare_to_ode([[args.q, 0], [-args.q, 0]], [1, -1], args.eps, Grid(args.L, args.N),
                         args.horizon, flow=args.flow, dt=args.dt)
    dev = rep.deviations
    print("t_pde     t_ode     p1_tracked  p1_ode      chordal_dev  E")
    for k in range(len(rep.pde_times)):
        print("%-9.4f %-9.4f %-11.5f %-11.5f %-12.3e %.5f"
              % (rep.pde_times[k], rep.ode_times[k], rep.tracked[k, 0, 0],
                 rep.predicted[k, 0, 0], dev[k], rep.energies[k]))
    print("max deviation %.4f, direction cosines %s" % (rep.max_deviation,
                                                        np.round(rep.direction_cosines, 4)))


if __name__ == "__main__":
    main()
