"""Per-trial performance metrics, UPQ efficiency theory and Monte-Carlo aggregation."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .phase import ChannelInstance, PhaseConfig, evaluate_gain


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def to_db(x):
    return 10.0 * np.log10(x)


def rate(objective: float, p_dbm: float = 30.0, sigma2_dbm: float = -90.0) -> float:
    """Spectral efficiency ``log2(1 + P/sigma^2 |g|^2)`` of one realisation."""
    snr = dbm_to_watt(p_dbm) / dbm_to_watt(sigma2_dbm)
    return float(np.log2(1.0 + snr * objective))


def normalized_power(ch: ChannelInstance, config: PhaseConfig) -> float:
    """``|g|^2 / (beta0 + sum beta_n)^2``, the fraction of the coherent upper bound."""
    total = ch.beta0 + float(ch.beta.sum())
    if total == 0:
        raise ValueError("normalized power undefined for an all-zero channel")
    return evaluate_gain(ch, config)[1] / total**2


def upq_efficiency(K) -> float:
    """Asymptotic UPQ power ratio ``sinc(1/K)**2`` (normalised sinc)."""
    if K < 2:
        raise ValueError("K must be >= 2")
    return float(np.sinc(1.0 / K) ** 2)


def upq_efficiency_finite(K, N: int, mean_beta_sq: float, mean_beta_pair: float) -> float:
    """Finite-N efficiency from the second moments of the amplitudes."""
    s = upq_efficiency(K)
    num = N * mean_beta_sq + N * (N - 1) * mean_beta_pair * s
    return num / (N * mean_beta_sq + N * (N - 1) * mean_beta_pair)


def efficiency_gain_db(K) -> float:
    if K < 3:
        raise ValueError("gain over K=2 defined for K >= 3")
    return float(to_db(upq_efficiency(K) / upq_efficiency(2)))


def table1(Ks=(2, 3, 4, 6, 8)) -> list[dict]:
    return [{"K": K, "efficiency": upq_efficiency(K),
             "gain_db": efficiency_gain_db(K) if K >= 3 else None} for K in Ks]


@dataclass
class TrialRecord:
    trial: int
    solver: str
    N: int
    K: int
    kappa: float
    objective: float
    snr_boost: float
    rate: float
    normalized_power: float
    steps: int
    elapsed: float = 0.0

    def __post_init__(self):
        if self.normalized_power > 1 + 1e-9:
            raise ValueError(f"normalized power {self.normalized_power} exceeds 1")
        if self.rate < 0:
            raise ValueError("rate must be nonnegative")


RECORD_FIELDS = [f.name for f in fields(TrialRecord)]
_INT_FIELDS = {"trial", "N", "K", "steps"}


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def records_to_csv(records, timing: bool = False) -> str:
    """One row per record; ``elapsed`` only with ``timing`` so output stays reproducible."""
    cols = RECORD_FIELDS if timing else [c for c in RECORD_FIELDS if c != "elapsed"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        d = asdict(r)
        w.writerow([fmt(d[c]) for c in cols])
    return buf.getvalue()


def records_from_csv(text: str) -> list[TrialRecord]:
    rows = csv.DictReader(io.StringIO(text))
    out = []
    for row in rows:
        kw = {}
        for k, v in row.items():
            if k == "solver":
                kw[k] = v
            elif k in _INT_FIELDS:
                kw[k] = int(v)
            else:
                kw[k] = float(v)
        out.append(TrialRecord(**kw))
    return out


class Aggregate:
    """Sorted sample with empirical CDF, percentiles (linear interpolation) and mean."""

    def __init__(self, values):
        v = np.sort(np.asarray(values, dtype=float).reshape(-1))
        if v.size == 0:
            raise ValueError("cannot aggregate an empty sample")
        self.values = v

    @property
    def count(self) -> int:
        return self.values.size

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    def percentile(self, p: float) -> float:
        return float(np.percentile(self.values, p, method="linear"))

    def cdf(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.values.size
        return self.values, np.arange(1, n + 1) / n

    def cdf_csv(self, header=("value", "cdf")) -> str:
        x, y = self.cdf()
        lines = [",".join(header)] + [f"{fmt(a)},{fmt(b)}" for a, b in zip(x, y)]
        return "\n".join(lines) + "\n"


def aggregate(records_or_values, key: str | None = None) -> Aggregate:
    if key is not None:
        return Aggregate([getattr(r, key) for r in records_or_values])
    return Aggregate(records_or_values)


def percentile(agg: Aggregate, p: float) -> float:
    return agg.percentile(p)


def summarize(records, key: str = "snr_boost", percentiles=(1, 50)) -> list[dict]:
    """Mean and percentiles of ``key`` per (solver, N, K)."""
    groups: dict[tuple, list] = {}
    for r in records:
        groups.setdefault((r.solver, r.N, r.K), []).append(getattr(r, key))
    out = []
    for (solver, N, K), vals in sorted(groups.items()):
        vals = [v for v in vals if not math.isnan(v)]
        if not vals:
            continue
        agg = Aggregate(vals)
        row = {"solver": solver, "N": N, "K": K, "metric": key, "count": agg.count, "mean": agg.mean}
        for p in percentiles:
            row[f"p{p:g}"] = agg.percentile(p)
        out.append(row)
    return out
