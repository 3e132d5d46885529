"""Max-min SNR discrete phase selection for U receivers sharing one RIS configuration.

For each anchor user the single-user N-step window (initial phases and
visit order from that user's channel) is walked while the fields of all U
users are updated incrementally; each step is scored by the weakest user's
SNR.  The best step over all anchors wins.  This is a heuristic: it is not
guaranteed to reach the max-min optimum.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from .channel import (
    LINK_BS_RIS,
    RisGeometry,
    ScenarioConfig,
    cascade,
    direct_link,
    rician_channel,
    trial_rng,
)
from .metrics import dbm_to_watt
from .phase import ChannelInstance, PhaseConfig, as_resolution
from .solvers import build_schedule, upq


@dataclass
class MulticastInstance:
    users: list
    noise_dbm: np.ndarray | float = -90.0

    def __post_init__(self):
        if len(self.users) < 1:
            raise ValueError("need at least one user")
        Ns = {u.N for u in self.users}
        if len(Ns) != 1:
            raise ValueError(f"users disagree on N: {sorted(Ns)}")
        self.noise_dbm = np.broadcast_to(np.asarray(self.noise_dbm, dtype=float), (self.U,)).copy()

    @property
    def U(self) -> int:
        return len(self.users)

    @property
    def N(self) -> int:
        return self.users[0].N

    @property
    def H(self) -> np.ndarray:
        return np.stack([u.h for u in self.users])

    @property
    def h0(self) -> np.ndarray:
        return np.array([u.h0 for u in self.users])


@dataclass
class MulticastResult:
    config: PhaseConfig
    min_snr: float
    anchor: int
    best_step: int
    updates: int
    elapsed: float


def user_snrs(inst: MulticastInstance, config: PhaseConfig, p_dbm: float = 30.0) -> np.ndarray:
    g = inst.h0 + inst.H @ config.weights
    return dbm_to_watt(p_dbm) * np.abs(g) ** 2 / dbm_to_watt(inst.noise_dbm)


def min_snr(inst: MulticastInstance, config: PhaseConfig, p_dbm: float = 30.0) -> float:
    return float(user_snrs(inst, config, p_dbm).min())


def anchor_sweep(inst: MulticastInstance, anchor: int, K, p_dbm: float = 30.0):
    """Walk ``anchor``'s window; returns (trace of all user fields, scores, schedule)."""
    res = as_resolution(K)
    sched = build_schedule(inst.users[anchor], res)
    steps = sched.n_units if np.any(inst.h0 != 0) else max(sched.n_units - 1, 0)
    H, roots, k0 = inst.H, res.roots, sched.initial
    g0 = inst.h0 + H @ roots[k0]
    trace = np.empty((inst.U, steps + 1), dtype=complex)
    trace[:, 0] = g0
    if steps:
        p = sched.perm
        kk = k0[p]
        delta = H[:, p] * (roots[(kk + 1) % res.K] - roots[kk])[None, :]
        unit = np.add.reduceat(delta, sched.starts, axis=1)
        trace[:, 1:] = g0[:, None] + np.cumsum(unit[:, :steps], axis=1)
    scale = dbm_to_watt(p_dbm) / dbm_to_watt(inst.noise_dbm)
    scores = (scale[:, None] * np.abs(trace) ** 2).min(axis=0)
    return trace, scores, sched, steps


def multicast_solve(inst: MulticastInstance, K, p_dbm: float = 30.0) -> MulticastResult:
    if inst.U < 2:
        raise ValueError("multicast needs U >= 2 users")
    t0 = time.perf_counter()
    res = as_resolution(K)
    best = (-1.0, 0, 0, None)
    updates = 0
    for u in range(inst.U):
        _, scores, sched, steps = anchor_sweep(inst, u, res, p_dbm)
        updates += int(sched.starts[steps]) if steps < sched.n_units else inst.N
        l = int(np.argmax(scores))
        if scores[l] > best[0]:
            k = sched.initial.copy()
            moved = sched.moved(l)
            k[moved] = (k[moved] + 1) % res.K
            best = (float(scores[l]), u, l, k)
    config = PhaseConfig(best[3], res)
    return MulticastResult(config, min_snr(inst, config, p_dbm), best[1], best[2], updates,
                           time.perf_counter() - t0)


def multicast_upq(inst: MulticastInstance, K, reference_user: int = 0) -> PhaseConfig:
    if inst.U < 2:
        raise ValueError("multicast needs U >= 2 users")
    return upq(inst.users[reference_user], K)


def multicast_exhaustive(inst: MulticastInstance, K, p_dbm: float = 30.0) -> tuple[PhaseConfig, float]:
    """Max-min SNR by enumerating all ``K**N`` configurations (small N only)."""
    res = as_resolution(K)
    best_val, best_k = -1.0, None
    for k in itertools.product(range(res.K), repeat=inst.N):
        cfg = PhaseConfig(np.array(k), res)
        v = min_snr(inst, cfg, p_dbm)
        if v > best_val:
            best_val, best_k = v, cfg
    return best_k, best_val


def draw_multicast(geom: RisGeometry, scenario: ScenarioConfig, U: int, trial: int = 0) -> MulticastInstance:
    """U users at the scenario's UE position with independent fading and a shared BS-RIS link."""
    seed = scenario.seed
    h_b = rician_channel(geom, scenario, "bs", trial_rng(seed, trial, LINK_BS_RIS))
    users = []
    for u in range(U):
        h_u = rician_channel(geom, scenario, "ue", trial_rng(seed, trial, 1000 + 2 * u))
        h0 = direct_link(scenario, trial_rng(seed, trial, 1001 + 2 * u))
        users.append(ChannelInstance(h0, cascade(h_u, h_b)))
    return MulticastInstance(users, scenario.noise_power_dbm)
