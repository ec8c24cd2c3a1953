"""Relax the equatorial antipodal pair and report the first moments of V."""
import argparse
import time

import numpy as np

from vortexflow.gl import Grid, build_well_prepared, energy, locate_vortices, relax_to_stationary


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--L", type=float, nargs="+", default=[4.0])
    ap.add_argument("--N", type=int, nargs="+", default=[256, 512])
    args = ap.parse_args()
    print("L     N     h         newton_res  |m|/E      q_relaxed  seconds")
    for L in args.L:
        for N in args.N:
            start = time.perf_counter()
            u = build_well_prepared([[1.0, 0], [-1.0, 0]], [1, -1], args.eps, Grid(L, N))
            v, hist = relax_to_stationary(u, presteps=20)
            e = energy(v)
            q = max(p[0] for p, _ in locate_vortices(v))
            print("%-5g %-5d %-9.5f %-11.1e %-10.2e %-10.6f %.1f"
                  % (L, N, 2 * L / N, hist[-1], np.max(np.abs(e.moments)) / e.E, q,
                     time.perf_counter() - start))


if __name__ == "__main__":
    main()
