"""Mean normalized received power against N for the optimum and UPQ.

The last column is sinc^2(1/K), the large-N limit for UPQ.
"""
import argparse

import numpy as np

from risphase.channel import RisGeometry, ScenarioConfig, draw_channel
from risphase.metrics import normalized_power, upq_efficiency
from risphase.solvers import algorithm3, upq


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", default="16,64,256,1024")
    ap.add_argument("--k", default="2,4,8")
    ap.add_argument("--kappa", type=float, default=10.0)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    ks = [int(v) for v in args.k.split(",")]
    sc = ScenarioConfig(kappa=args.kappa, seed=args.seed)
    print(f"{'N':>6} {'K':>3} {'optimal':>9} {'upq':>9} {'limit':>9}")
    for N in (int(v) for v in args.n.split(",")):
        geom = RisGeometry.square(N)
        chans = [draw_channel(geom, sc, t) for t in range(args.trials)]
        for K in ks:
            opt = np.mean([normalized_power(ch, algorithm3(ch, K).config) for ch in chans])
            base = np.mean([normalized_power(ch, upq(ch, K)) for ch in chans])
            print(f"{N:>6} {K:>3} {opt:>9.4f} {base:>9.4f} {upq_efficiency(K):>9.4f}")


if __name__ == "__main__":
    main()
