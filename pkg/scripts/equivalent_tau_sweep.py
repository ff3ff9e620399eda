"""How slowly the equivalent time coefficient approaches the largest component.

For the two-timescale mixture (weights 0.8/0.2, taus 4/2 h) prints tau(t)
on a log-spaced grid and the time at which tau(t) first reaches a target.
"""

import argparse

import numpy as np
from scipy.optimize import brentq

from ipsuncert import ExpDecayProfile, equivalent_tau, mixture_from_profiles


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--target", type=float, default=3.999, help="hours")
    args = ap.parse_args()

    m = mixture_from_profiles([(1.0, ExpDecayProfile(8, 4)), (1.0, ExpDecayProfile(2, 2))])
    print("t_h,tau_equiv_h")
    for t in [0.0, *np.logspace(-1, 5, 13)]:
        print(f"{t:.6g},{equivalent_tau(m, t):.9f}")
    hi = 1e7
    if equivalent_tau(m, hi) > args.target:
        t_hit = brentq(lambda t: equivalent_tau(m, t) - args.target, 1e-6, hi, xtol=1e-6)
        print(f"tau(t) first reaches {args.target} h at t = {t_hit:.1f} h")


if __name__ == "__main__":
    main()
