"""Monte-Carlo trials, timing benchmarks and multicast runs.

Trials are independent: trial ``t`` draws its channels from generators keyed
by ``(seed, t, link)``.  With several workers the trial range is split into
contiguous chunks and results are concatenated in trial order, so output
does not depend on the worker count.
"""
from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .channel import RisGeometry, ScenarioConfig, draw_channel
from .metrics import TrialRecord
from .multicast import draw_multicast, min_snr, multicast_solve, multicast_upq
from .solvers import DuplicatePhaseError, algorithm3, candidate_enum_oracle, certify, get_solver

WORKERS_ENV = "RISPHASE_WORKERS"
OPTIMAL_SOLVERS = {"algorithm1", "algorithm2", "algorithm3", "exhaustive", "candidate"}


class VerificationError(RuntimeError):
    pass


@dataclass
class RunSpec:
    command: str = "experiment"
    solvers: list = field(default_factory=lambda: ["algorithm2", "upq"])
    n_list: list = field(default_factory=lambda: [64])
    k_list: list = field(default_factory=lambda: [2])
    kappa: float = 0.0
    trials: int = 100
    seed: int = 0
    users: int = 4
    out: str | None = None
    format: str = "csv"
    verify: bool = False
    blocked_direct: bool = False
    timing: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(n < 1 for n in self.n_list):
            raise ValueError("every N must be >= 1")
        if any(k < 2 for k in self.k_list):
            raise ValueError("every K must be >= 2")
        for s in self.solvers:
            get_solver(s)

    def scenario(self) -> ScenarioConfig:
        return ScenarioConfig(kappa=self.kappa, direct_link_blocked=self.blocked_direct, seed=self.seed)


def worker_count(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, default)))
    except ValueError:
        return default


def _chunks(n: int, parts: int) -> list[range]:
    parts = max(1, min(parts, n))
    size = math.ceil(n / parts)
    return [range(s, min(s + size, n)) for s in range(0, n, size)]


def _map_trials(fn, spec: RunSpec, workers: int) -> list:
    """Run ``fn(spec, trials)`` over trial chunks and concatenate in trial order."""
    chunks = _chunks(spec.trials, workers)
    if workers <= 1 or len(chunks) == 1:
        return [r for c in chunks for r in fn(spec, c)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(fn, [spec] * len(chunks), chunks))
    return [r for part in parts for r in part]


def run_solver(ch, K: int, solver: str):
    """Call ``solver``; algorithm2 hands duplicate breakpoint sets to the grouped sweep."""
    try:
        return get_solver(solver)(ch, K)
    except DuplicatePhaseError:
        if solver != "algorithm2":
            raise
        return algorithm3(ch, K)


def solve_trial(ch, K: int, solver: str, verify: bool = False):
    res = run_solver(ch, K, solver)
    if verify and solver in OPTIMAL_SOLVERS:
        ref = candidate_enum_oracle(ch, K).objective
        if not certify(ch, res) or abs(res.objective - ref) > 1e-9 * max(ref, 1e-300):
            raise VerificationError(f"{solver} failed verification (objective {res.objective}, "
                                    f"oracle {ref})")
    return res


def _experiment_chunk(spec: RunSpec, trials) -> list[TrialRecord]:
    sc = spec.scenario()
    out = []
    for N in spec.n_list:
        geom = RisGeometry.square(N)
        for t in trials:
            ch = draw_channel(geom, sc, t)
            for K in spec.k_list:
                for s in spec.solvers:
                    res = solve_trial(ch, K, s, spec.verify)
                    out.append(TrialRecord(
                        trial=t, solver=s, N=N, K=K, kappa=spec.kappa,
                        objective=res.objective,
                        snr_boost=res.snr_boost if res.snr_boost is not None else float("nan"),
                        rate=metrics.rate(res.objective, sc.tx_power_dbm, sc.noise_power_dbm),
                        normalized_power=metrics.normalized_power(ch, res.config),
                        steps=res.steps_executed,
                        elapsed=res.elapsed,
                    ))
    return out


def run_experiment(spec: RunSpec, workers: int | None = None) -> list[TrialRecord]:
    records = _map_trials(_experiment_chunk, spec, workers or worker_count())
    order = {(N, K, s): i for i, (N, K, s) in enumerate(
        (N, K, s) for N in spec.n_list for K in spec.k_list for s in spec.solvers)}
    return sorted(records, key=lambda r: (order[(r.N, r.K, r.solver)], r.trial))


def bench(solvers, n_list, k_list, trials: int = 1000, seed: int = 0) -> list[dict]:
    """Total solver wall time over ``trials`` Rayleigh (kappa = 0) realisations.

    Channels are drawn before the clock starts; only the solver calls are timed.
    """
    sc = ScenarioConfig(kappa=0.0, seed=seed)
    rows = []
    for N in n_list:
        geom = RisGeometry.square(N)
        channels = [draw_channel(geom, sc, t) for t in range(trials)]
        for K in k_list:
            for s in solvers:
                get_solver(s)
                t0 = time.perf_counter()
                for ch in channels:
                    run_solver(ch, K, s)
                rows.append({"solver": s, "N": N, "K": K, "trials": trials,
                             "seconds": time.perf_counter() - t0})
    return rows


def bench_table(rows, K: int) -> str:
    """Plain-text table, one row per solver and one column per N."""
    rows = [r for r in rows if r["K"] == K]
    ns = sorted({r["N"] for r in rows})
    solvers = list(dict.fromkeys(r["solver"] for r in rows))
    cell = {(r["solver"], r["N"]): r["seconds"] for r in rows}
    head = f"{'K=' + str(K):<12}" + "".join(f"{'N=' + str(n):>12}" for n in ns)
    lines = [head]
    for s in solvers:
        lines.append(f"{s:<12}" + "".join(f"{cell[(s, n)]:>12.4f}" for n in ns))
    return "\n".join(lines)


@dataclass
class MulticastRecord:
    trial: int
    method: str
    N: int
    K: int
    U: int
    min_snr_db: float


def _multicast_chunk(spec: RunSpec, trials) -> list[MulticastRecord]:
    sc = spec.scenario()
    out = []
    for N in spec.n_list:
        geom = RisGeometry.square(N)
        for t in trials:
            inst = draw_multicast(geom, sc, spec.users, t)
            for K in spec.k_list:
                opt = multicast_solve(inst, K, sc.tx_power_dbm)
                base = min_snr(inst, multicast_upq(inst, K), sc.tx_power_dbm)
                out.append(MulticastRecord(t, "multicast", N, K, spec.users, float(metrics.to_db(opt.min_snr))))
                out.append(MulticastRecord(t, "upq", N, K, spec.users, float(metrics.to_db(base))))
    return out


def run_multicast(spec: RunSpec, workers: int | None = None) -> list[MulticastRecord]:
    records = _map_trials(_multicast_chunk, spec, workers or worker_count())
    return sorted(records, key=lambda r: (r.N, r.K, r.method != "multicast", r.trial))


def multicast_gain_db(records) -> dict:
    """Mean per-trial dB gain of the sweep over the UPQ baseline, per (N, K)."""
    by = {}
    for r in records:
        by.setdefault((r.N, r.K, r.trial), {})[r.method] = r.min_snr_db
    gains = {}
    for (N, K, _), d in by.items():
        gains.setdefault((N, K), []).append(d["multicast"] - d["upq"])
    return {key: float(np.mean(v)) for key, v in gains.items()}

