#!/usr/bin/env python3
"""Five-decade dispersive decay sweep for the flux-line operator.

Evolves a Gaussian ring under circulation alpha and tabulates the decay
functional t * sup|u(t)| / ||u0||_1 over log-spaced times, the quantity
whose boundedness encodes the |t|^{-1} smoothing estimate.  At full scale
(37000 radial points, twelve times across [1e-2, 1e3]) this takes about
two minutes.
"""

import argparse
import sys

import numpy as np

from emschro.kernel import ab_eigendata
from emschro.propagator import decay_profile, gaussian_ring


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--alpha", type=float, default=0.3)
    parser.add_argument("--r0", type=float, default=5.0)
    parser.add_argument("--width", type=float, default=1.0)
    parser.add_argument("--r-max", type=float, default=12.0)
    parser.add_argument("--n-r", type=int, default=37000,
                        help="radial samples; the t = 1e-2 endpoint needs ~37k")
    parser.add_argument("--angular-mode", type=int, default=0)
    parser.add_argument("--t-min", type=float, default=1e-2)
    parser.add_argument("--t-max", type=float, default=1e3)
    parser.add_argument("--n-t", type=int, default=12)
    parser.add_argument("--out", default="decay_sweep.csv")
    args = parser.parse_args()

    data = ab_eigendata(args.alpha, max(8, abs(args.angular_mode) + 4))
    u0 = gaussian_ring(args.r0, args.width, args.n_r, args.r_max,
                       n_theta=64, angular_mode=args.angular_mode)
    times = np.logspace(np.log10(args.t_min), np.log10(args.t_max), args.n_t)
    report = decay_profile(data, u0, times)

    with open(args.out, "w") as fh:
        fh.write("t,sup_norm,decay_functional,l2_ratio\n")
        for row in report.rows:
            fh.write(f"{row.t:.17g},{row.sup_norm:.17g},{row.decay_functional:.17g},"
                     f"{row.l2_norm / report.l2_initial:.17g}\n")

    print(f"wrote {args.out}")
    print(f"empirical constant  {report.empirical_constant:.6f}")
    print(f"max over median     {report.max_over_median:.4f}")
    print(f"worst L2 drift      {report.l2_max_drift:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
