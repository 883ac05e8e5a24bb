"""Noiseless linear amplification against the best Gaussian amplifier.

For each target gain the NLA gain is tuned to the photon-number cutoff. The
conditional MSD drops below the Gaussian floor and approaches the quantum limit
as the cutoff grows.
"""

import argparse

from ampbench.bounds import gaussian_min_msd, symmetric_msd_bound
from ampbench.channels import NlaConfig
from ampbench.nla import nla_gain_for_cutoff, nla_msd


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambda", dest="lam", type=float, default=0.4)
    ap.add_argument("--eta", type=float, nargs="+", default=[1.2, 1.5, 1.7])
    ap.add_argument("--N", type=int, nargs="+", default=[5, 10, 20, 40, 60, 120])
    args = ap.parse_args()

    for eta in args.eta:
        floor, limit = gaussian_min_msd(eta, args.lam), symmetric_msd_bound(eta, args.lam)
        print(f"eta = {eta}: Gaussian floor {floor:.6f}, quantum limit {limit:.6f}")
        for N in args.N:
            g = nla_gain_for_cutoff(eta, args.lam, N)
            perf = nla_msd(NlaConfig(g, N), args.lam, eta)
            mark = "*" if perf.vbar_prob < floor else " "
            print(f"  N = {N:4d}  g = {g:.6f}  MSD/P_s = {perf.vbar_prob:.6f} {mark}  P_s = {perf.p_s:.3e}")
    print("\n* beats every Gaussian amplifier")


if __name__ == "__main__":
    main()
