"""Asymptotic UPQ efficiency per K next to a Monte-Carlo estimate at large N.

    python3 scripts/efficiency_table.py --n 1024 --trials 2000 --kappa 10
"""
import argparse

import numpy as np

from risphase.channel import RisGeometry, ScenarioConfig, draw_channel
from risphase.metrics import efficiency_gain_db, normalized_power, upq_efficiency
from risphase.solvers import upq


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", default="2,3,4,6,8")
    ap.add_argument("--n", type=int, default=1024)
    ap.add_argument("--trials", type=int, default=2000)
    ap.add_argument("--kappa", type=float, default=10.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    geom = RisGeometry.square(args.n)
    sc = ScenarioConfig(kappa=args.kappa, seed=args.seed)
    chans = [draw_channel(geom, sc, t) for t in range(args.trials)]

    print(f"{'K':>3} {'sinc^2(1/K)':>12} {'vs K=2 [dB]':>12} {'empirical':>10}")
    for K in (int(v) for v in args.k.split(",")):
        emp = np.mean([normalized_power(ch, upq(ch, K)) for ch in chans])
        gain = f"{efficiency_gain_db(K):.2f}" if K >= 3 else "-"
        print(f"{K:>3} {upq_efficiency(K):>12.4f} {gain:>12} {emp:>10.4f}")


if __name__ == "__main__":
    main()
