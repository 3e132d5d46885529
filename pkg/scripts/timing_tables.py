"""Solver wall time over Rayleigh realisations, one table per K."""
import argparse

from risphase.experiment import bench, bench_table


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--solver", default="upq,algorithm1,algorithm2")
    ap.add_argument("--n", default="250,500,1000,2000")
    ap.add_argument("--k", default="2,4")
    ap.add_argument("--trials", type=int, default=1000)
    args = ap.parse_args()

    ks = [int(v) for v in args.k.split(",")]
    rows = bench(args.solver.split(","), [int(v) for v in args.n.split(",")], ks, args.trials)
    for K in ks:
        print(bench_table(rows, K))
        print()


if __name__ == "__main__":
    main()
