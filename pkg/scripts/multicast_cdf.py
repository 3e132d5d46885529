"""Minimum SNR across U users: anchor sweep against UPQ from one reference user."""
import argparse
from pathlib import Path

from risphase.experiment import RunSpec, multicast_gain_db, run_multicast
from risphase.metrics import Aggregate, fmt


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--users", type=int, default=4)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--blocked-direct", action="store_true")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="runs/multicast_cdf.csv")
    args = ap.parse_args()

    spec = RunSpec(command="multicast", n_list=[args.n], k_list=[args.k], users=args.users,
                   trials=args.trials, seed=args.seed, blocked_direct=args.blocked_direct)
    recs = run_multicast(spec)
    lines = ["method,min_snr_db,cdf"]
    for m in ("multicast", "upq"):
        agg = Aggregate([r.min_snr_db for r in recs if r.method == m])
        x, y = agg.cdf()
        lines += [f"{m},{fmt(a)},{fmt(b)}" for a, b in zip(x, y)]
        print(f"{m:>10}: median {agg.percentile(50):.2f} dB, 10th pct {agg.percentile(10):.2f} dB")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n")
    print(f"mean gain {multicast_gain_db(recs)[(args.n, args.k)]:.2f} dB -> {out}")


if __name__ == "__main__":
    main()
