"""Tabulate the ensemble MSD limits against the amplifier gain.

Prints a coarse version of the symmetric-task table: the quantum limit for
normal and conjugate amplification, the best Gaussian channel and the
traditional infinite-width limits, for a prior of inverse width lambda.
"""

import argparse

from ampbench import figures
from ampbench.bounds import gaussian_min_msd, gaussian_optimal_gain


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambda", dest="lam", type=float, default=0.4)
    ap.add_argument("--steps", type=int, default=16)
    args = ap.parse_args()

    rows = figures.fig1b_rows(args.lam, 0.0, 3.0, args.steps)
    cols = figures.FIG1B_COLUMNS
    print("  ".join(f"{c:>13}" for c in cols))
    for row in rows:
        print("  ".join(f"{row[c]:13.6f}" for c in cols))

    kink = 1 + args.lam
    print(f"\nnormal bound has its kink at eta = 1 + lambda = {kink:g}")
    for eta in (1.2, 1.7):
        print(f"eta = {eta}: Gaussian optimum {gaussian_min_msd(eta, args.lam):.6f} "
              f"at G = {gaussian_optimal_gain(eta, args.lam):.6f}")


if __name__ == "__main__":
    main()
