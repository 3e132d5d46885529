import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from risphase import metrics
from risphase.metrics import (
    Aggregate,
    TrialRecord,
    aggregate,
    efficiency_gain_db,
    normalized_power,
    percentile,
    rate,
    records_from_csv,
    records_to_csv,
    summarize,
    upq_efficiency,
    upq_efficiency_finite,
)
from risphase.phase import ChannelInstance, PhaseConfig
from risphase.solvers import algorithm3, upq

from conftest import rayleigh


def test_rate_examples():
    assert rate(0.0) == 0
    assert abs(rate(1.0, 0.0, 0.0) - 1.0) < 1e-15
    assert abs(rate(1e-10, 30, -90) - math.log2(101)) < 1e-12
    assert abs(rate(1e-10) - 6.658) < 1e-3
    assert rate(2e-10) > rate(1e-10)


def test_normalized_power_examples():
    z = PhaseConfig.zeros(2, 4)
    assert abs(normalized_power(ChannelInstance(1, [2, 3]), z) - 1) < 1e-15
    assert normalized_power(ChannelInstance(1, [-1]), PhaseConfig.zeros(1, 2)) == 0
    with pytest.raises(ValueError):
        normalized_power(ChannelInstance(0, [0, 0]), z)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), N=st.integers(1, 30), K=st.sampled_from([2, 3, 4, 8]),
       direct=st.booleans())
def test_normalized_power_range_and_dominance(seed, N, K, direct):
    ch = rayleigh(np.random.default_rng(seed), N, direct)
    opt = normalized_power(ch, algorithm3(ch, K).config)
    base = normalized_power(ch, upq(ch, K))
    assert 0 <= base <= opt * (1 + 1e-12) <= 1 + 1e-9


def test_table_values():
    want = {2: 0.4053, 3: 0.6839, 4: 0.8106, 6: 0.9119, 8: 0.9496}
    for K, v in want.items():
        assert abs(upq_efficiency(K) - v) <= 1e-4
    assert abs(upq_efficiency(2) - (2 / np.pi) ** 2) < 1e-15
    for K, v in {3: 2.27, 4: 3.01, 6: 3.52, 8: 3.70}.items():
        assert abs(efficiency_gain_db(K) - v) <= 0.01
    assert abs(upq_efficiency(10**6) - 1) < 1e-11
    e = [upq_efficiency(K) for K in range(2, 20)]
    assert all(a < b for a, b in zip(e, e[1:]))
    with pytest.raises(ValueError):
        efficiency_gain_db(2)
    rows = metrics.table1()
    assert [r["K"] for r in rows] == [2, 3, 4, 6, 8] and rows[0]["gain_db"] is None


def test_finite_efficiency_monte_carlo():
    # unit amplitudes, residuals uniform on [-pi/K, pi/K]
    rng = np.random.default_rng(5)
    N, K, T = 8, 4, 20000
    d = rng.uniform(-np.pi / K, np.pi / K, (T, N))
    emp = np.mean(np.abs(np.exp(1j * d).sum(axis=1)) ** 2) / N**2
    assert abs(emp / upq_efficiency_finite(K, N, 1.0, 1.0) - 1) < 0.01
    assert abs(upq_efficiency_finite(K, 10**6, 1.0, 1.0) - upq_efficiency(K)) < 1e-5


def test_aggregate_examples():
    assert percentile(aggregate([3, 1, 2]), 50) == 2
    a = Aggregate([4.5] * 7)
    assert a.percentile(1) == a.percentile(99) == 4.5
    u = np.random.default_rng(6).uniform(0, 1, 10_000)
    assert abs(Aggregate(u).percentile(1) - 0.01) < 0.005
    with pytest.raises(ValueError):
        Aggregate([])
    x, y = Aggregate([3, 1, 2]).cdf()
    assert x.tolist() == [1, 2, 3] and np.all(np.diff(y) > 0) and y[-1] == 1
    assert Aggregate([3, 1, 2]).cdf_csv().splitlines()[1] == "1,0.333333333333"


def _rec(t, s, boost):
    return TrialRecord(t, s, 8, 2, 0.0, 1e-10, boost, rate(1e-10), 0.5, 8, 0.01)


def test_record_invariants():
    with pytest.raises(ValueError):
        TrialRecord(0, "x", 1, 2, 0.0, 1.0, 1.0, 1.0, 1.5, 1)
    with pytest.raises(ValueError):
        TrialRecord(0, "x", 1, 2, 0.0, 1.0, 1.0, -1.0, 0.5, 1)


def test_csv_round_trip():
    recs = [_rec(t, s, 1.0 + t / 3) for s in ("upq", "algorithm2") for t in range(4)]
    text = records_to_csv(recs, timing=True)
    back = records_from_csv(text)
    assert records_to_csv(back, timing=True) == text
    plain = records_to_csv(recs)
    assert "elapsed" not in plain.splitlines()[0]
    assert records_from_csv(plain)[0].elapsed == 0.0


def test_summarize():
    recs = [_rec(t, "upq", float(t)) for t in range(1, 101)]
    rows = summarize(recs, "snr_boost")
    assert len(rows) == 1
    r = rows[0]
    assert r["count"] == 100 and r["mean"] == 50.5 and abs(r["p1"] - 1.99) < 1e-12
    assert r["p1"] <= r["p50"]
    nan = [_rec(0, "algorithm2", float("nan"))]
    assert summarize(nan, "snr_boost") == []
