"""Integrated pair trajectories against q(t) = sqrt((1 + c e^t)/(1 - c e^t))."""
import argparse

import numpy as np

from vortexflow import flow
from vortexflow.energy import VortexConfiguration


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q0", type=float, nargs="+", default=[1 / 3, 0.5, 0.9, 1.1, 2.0])
    ap.add_argument("--fraction", type=float, default=0.9)
    args = ap.parse_args()
    print("q0        end_time   max_rel_err")
    for q0 in args.q0:
        T = args.fraction * flow.explicit_pair_end_time(q0)
        cfg = VortexConfiguration([[q0, 0], [-q0, 0]], [1, -1])
        trace = flow.integrate(cfg, flow.FlowSpec(max_time=T, output_stride=T / 100))
        err = max(abs(s.config.positions[0, 0] / flow.explicit_pair_q(q0, s.time) - 1)
                  for s in trace.samples)
        print("%-9.4f %-10.5f %.3e" % (q0, flow.explicit_pair_end_time(q0), err))
    t = flow.integrate(VortexConfiguration([[1 / 3, 0], [-1 / 3, 0]], [1, -1]),
                       flow.FlowSpec(max_time=1.0)).annihilation_time
    print("q0=1/3 annihilation at %.8f, ln(1.25) = %.8f" % (t, np.log(1.25)))


if __name__ == "__main__":
    main()
