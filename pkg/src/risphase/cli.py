"""Command-line front end.

    risphase solve instance.json --k 4 --solver algorithm2 --verify
    risphase experiment --solver algorithm2,upq --n 64 --k 2 --trials 2000 --out runs/k2.csv
    risphase bench --n 250,500,1000,2000 --k 2 --trials 1000
    risphase multicast --n 64 --k 2 --users 4 --trials 1000 --out runs/mc.csv
    risphase table1

Exit codes: 0 success, 2 bad input, 3 verification failure, 4 I/O error.
The worker count for experiment/multicast comes from ``RISPHASE_WORKERS``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import metrics
from .experiment import (
    RunSpec,
    VerificationError,
    bench,
    bench_table,
    multicast_gain_db,
    run_experiment,
    run_multicast,
)
from .records import RecordFormatError, load_channel, result_to_record
from .solvers import (
    SOLVERS,
    DuplicatePhaseError,
    OracleBudgetError,
    candidate_enum_oracle,
    certify,
    exhaustive_oracle,
    get_solver,
)

EXIT_INPUT = 2
EXIT_VERIFY = 3
EXIT_IO = 4


def _int_list(s: str) -> list[int]:
    return [int(v) for v in s.split(",") if v]


def _str_list(s: str) -> list[str]:
    return [v.strip() for v in s.split(",") if v.strip()]


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True)
    path.write_text(text)


def _sibling(out: str | None, suffix: str) -> str | None:
    if out is None:
        return None
    p = Path(out)
    return str(p.with_name(p.stem + suffix))


def _rows_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: metrics.fmt(v) if v is not None else "" for k, v in r.items()})
    return buf.getvalue()


def cmd_solve(args) -> int:
    ch = load_channel(args.instance)
    solver = get_solver(args.solver)
    res = solver(ch, args.k)
    rec = result_to_record(res)
    status = 0
    if args.verify:
        try:
            ref = exhaustive_oracle(ch, args.k)
        except OracleBudgetError:
            ref = candidate_enum_oracle(ch, args.k)
        ok = abs(res.objective - ref.objective) <= 1e-9 * max(ref.objective, 1e-300)
        if args.solver != "upq":
            ok = ok and certify(ch, res)
        rec["verified"] = ok
        rec["oracle"] = ref.solver
        rec["oracle_objective"] = ref.objective
        if not ok:
            status = EXIT_VERIFY
    if args.format == "json":
        text = json.dumps(rec, indent=1) + "\n"
    else:
        text = "".join(f"{k}: {' '.join(map(str, v)) if isinstance(v, list) else v}\n"
                       for k, v in rec.items())
    _emit(text, args.out)
    return status


def _spec(args, command: str) -> RunSpec:
    return RunSpec(
        command=command,
        solvers=_str_list(getattr(args, "solver", "algorithm2,upq")),
        n_list=_int_list(args.n),
        k_list=_int_list(args.k),
        kappa=args.kappa,
        trials=args.trials,
        seed=args.seed,
        users=getattr(args, "users", 4),
        out=args.out,
        format=args.format,
        verify=getattr(args, "verify", False),
        blocked_direct=args.blocked_direct,
        timing=getattr(args, "timing", False),
    )


def cmd_experiment(args) -> int:
    spec = _spec(args, "experiment")
    records = run_experiment(spec)
    summary = metrics.summarize(records, "snr_boost") + metrics.summarize(records, "rate") \
        + metrics.summarize(records, "normalized_power")
    if spec.format == "json":
        doc = {"spec": asdict(spec), "records": [asdict(r) for r in records], "summary": summary}
        if not spec.timing:
            for r in doc["records"]:
                r.pop("elapsed")
        _emit(json.dumps(doc, indent=1, allow_nan=True) + "\n", spec.out)
        return 0
    _emit(metrics.records_to_csv(records, timing=spec.timing), spec.out)
    if spec.out is not None:
        _emit(_rows_csv(summary), _sibling(spec.out, ".summary.csv"))
        cdf_rows = []
        groups = {}
        for r in records:
            groups.setdefault((r.solver, r.N, r.K), []).append(r.snr_boost)
        for (s, N, K), vals in sorted(groups.items()):
            vals = [v for v in vals if v == v]
            if not vals:
                continue
            x, y = metrics.Aggregate(vals).cdf()
            cdf_rows += [{"solver": s, "N": N, "K": K, "snr_boost": a, "cdf": b} for a, b in zip(x, y)]
        _emit(_rows_csv(cdf_rows), _sibling(spec.out, ".cdf.csv"))
    return 0


def cmd_bench(args) -> int:
    rows = bench(_str_list(args.solver), _int_list(args.n), _int_list(args.k), args.trials, args.seed)
    if args.format == "json":
        _emit(json.dumps(rows, indent=1) + "\n", args.out)
    elif args.out:
        _emit(_rows_csv(rows), args.out)
    for K in _int_list(args.k):
        print(bench_table(rows, K), file=sys.stderr if args.out is None and args.format == "json" else sys.stdout)
    return 0


def cmd_multicast(args) -> int:
    spec = _spec(args, "multicast")
    if spec.users < 2:
        raise ValueError("multicast needs --users >= 2")
    records = run_multicast(spec)
    rows = [asdict(r) for r in records]
    gains = multicast_gain_db(records)
    if spec.format == "json":
        doc = {"records": rows, "mean_gain_db": [{"N": N, "K": K, "gain_db": g} for (N, K), g in gains.items()]}
        _emit(json.dumps(doc, indent=1) + "\n", spec.out)
    else:
        _emit(_rows_csv(rows), spec.out)
        if spec.out is not None:
            cdf_rows = []
            for method in ("multicast", "upq"):
                for (N, K) in gains:
                    vals = [r.min_snr_db for r in records if r.method == method and r.N == N and r.K == K]
                    x, y = metrics.Aggregate(vals).cdf()
                    cdf_rows += [{"method": method, "N": N, "K": K, "min_snr_db": a, "cdf": b}
                                 for a, b in zip(x, y)]
            _emit(_rows_csv(cdf_rows), _sibling(spec.out, ".cdf.csv"))
    for (N, K), g in gains.items():
        print(f"N={N} K={K} U={spec.users}: mean min-SNR gain over UPQ {g:.2f} dB", file=sys.stderr)
    return 0


def cmd_table1(args) -> int:
    rows = metrics.table1(_int_list(args.k))
    if args.format == "json":
        _emit(json.dumps(rows, indent=1) + "\n", args.out)
    else:
        _emit(_rows_csv(rows), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="risphase", description="Optimal K-ary RIS phase selection")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one channel record")
    s.add_argument("instance")
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--solver", default="algorithm3", choices=sorted(SOLVERS))
    s.add_argument("--verify", action="store_true")
    s.add_argument("--format", choices=("json", "text"), default="json")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    def trial_args(sp, n="64", k="2", trials=100):
        sp.add_argument("--n", default=n, help="comma-separated RIS sizes")
        sp.add_argument("--k", default=k, help="comma-separated phase resolutions")
        sp.add_argument("--kappa", type=float, default=0.0)
        sp.add_argument("--trials", type=int, default=trials)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--blocked-direct", action="store_true")

    e = sub.add_parser("experiment", help="Monte-Carlo comparison of solvers")
    trial_args(e)
    e.add_argument("--solver", default="algorithm2,upq")
    e.add_argument("--verify", action="store_true")
    e.add_argument("--timing", action="store_true", help="add per-solve wall time (not reproducible)")
    e.set_defaults(func=cmd_experiment)

    b = sub.add_parser("bench", help="solver wall time over Rayleigh realisations")
    b.add_argument("--solver", default="upq,algorithm1,algorithm2")
    b.add_argument("--n", default="250,500,1000,2000")
    b.add_argument("--k", default="2")
    b.add_argument("--trials", type=int, default=1000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.add_argument("--format", choices=("csv", "json"), default="csv")
    b.set_defaults(func=cmd_bench)

    m = sub.add_parser("multicast", help="max-min SNR over several users")
    trial_args(m)
    m.add_argument("--users", type=int, default=4)
    m.set_defaults(func=cmd_multicast)

    t = sub.add_parser("table1", help="asymptotic UPQ efficiency per K")
    t.add_argument("--k", default="2,3,4,6,8")
    t.add_argument("--out")
    t.add_argument("--format", choices=("csv", "json"), default="csv")
    t.set_defaults(func=cmd_table1)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RecordFormatError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except VerificationError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except (DuplicatePhaseError, OracleBudgetError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
