"""Completion times of random cap configurations against the bound ln(1/kappa)."""
import argparse

import numpy as np

from vortexflow import flow


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--cos", type=float, default=0.9, help="sqrt(1 - s^2), the cap level")
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    s = np.sqrt(1 - args.cos**2)
    rep = flow.annihilation_scan(args.n, s, args.trials, seed=args.seed)
    t = rep.completion_times
    print("n=%d s=%.4f kappa=%.4f bound=%.5f slack=%.0e" % (rep.n, rep.s, rep.kappa, rep.bound,
                                                             rep.slack))
    print("within bound: %d/%d" % (rep.within_bound, rep.trials))
    print("completion time quantiles (0, 50, 90, 100%%): %s"
          % np.round(np.quantile(t, [0, 0.5, 0.9, 1.0]), 5).tolist())
    print("mean collisions per trial: %.2f" % rep.n_collisions.mean())


if __name__ == "__main__":
    main()
