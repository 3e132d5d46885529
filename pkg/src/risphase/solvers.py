"""Discrete phase selection for ``max |h0 + sum_n h_n exp(j theta_n)|``.

Every element's optimal phase is a function of the direction ``mu`` of the
total field alone, and flips by one step each time ``mu`` crosses one of the
element's K breakpoints ``alpha_n + (k - 1/2) w``.  The sweep solvers walk
those breakpoints in angular order and update the running field one
crossing at a time:

* ``algorithm1`` visits all ``L <= N*K`` distinct breakpoints.
* ``algorithm2`` uses the fact that the crossing order repeats every N
  breakpoints (and that a uniform shift of all phases leaves ``|g_c|``
  unchanged), so one window of N crossings starting half a step before the
  direct-link phase is enough.
* ``algorithm3`` is the same window where elements with identical breakpoint
  sets are moved together, giving ``N - N'`` steps.

``exhaustive_oracle`` and ``candidate_enum_oracle`` do not share any sweep
code and are used to check the three sweeps.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .phase import (
    TWO_PI,
    ChannelInstance,
    PhaseConfig,
    PhaseResolution,
    as_resolution,
    evaluate_gain,
    wrap_2pi,
)

TIE_TOL = 1e-9
EXHAUSTIVE_BUDGET = 2**24


class DuplicatePhaseError(ValueError):
    """Two elements share a breakpoint set; the grouped sweep (algorithm3) is required."""


class OracleBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class Breakpoint:
    lam: float
    members: tuple  # element indices crossing at this phase


@dataclass
class SweepSchedule:
    perm: np.ndarray  # element indices in visit order
    starts: np.ndarray  # offset in ``perm`` where each visit unit begins
    phi: np.ndarray  # key of each unit, in [0, w)
    steps: int
    mu0: float
    initial: np.ndarray  # phase indices at the first evaluation

    @property
    def n_units(self) -> int:
        return self.starts.size

    @property
    def order(self) -> list[tuple]:
        """Visit units as sorted tuples of element indices."""
        return [tuple(sorted(u.tolist())) for u in np.split(self.perm, self.starts[1:])]

    def moved(self, l: int) -> np.ndarray:
        """Elements incremented by the first ``l`` units."""
        return self.perm[:self.starts[l]] if l < self.n_units else self.perm


@dataclass
class SolveResult:
    config: PhaseConfig
    objective: float  # |g|^2
    snr_boost: float | None  # |g|^2 / beta0^2, None without a direct link
    steps_executed: int
    best_step: int
    elapsed: float
    solver: str = ""
    g: complex = 0j
    trace: np.ndarray | None = field(default=None, repr=False)  # g_0..g_steps for sweeps

    def to_dict(self) -> dict:
        return {
            "solver": self.solver,
            "K": self.config.K,
            "k": self.config.k.tolist(),
            "objective": self.objective,
            "snr_boost": self.snr_boost,
            "steps_executed": self.steps_executed,
            "best_step": self.best_step,
            "elapsed": self.elapsed,
        }


def _result(ch, config, steps, best, t0, solver, trace=None) -> SolveResult:
    g, power = evaluate_gain(ch, config)
    boost = power / ch.beta0**2 if ch.beta0 > 0 else None
    return SolveResult(config, power, boost, int(steps), int(best),
                       time.perf_counter() - t0, solver, g, trace)


def _first_argmax(values: np.ndarray) -> int:
    # strict '>' in the sweep keeps the earliest maximiser
    return int(np.argmax(values))


# ---------------------------------------------------------------------------
# per-element rules


def lemma_select(alpha, mu_phase, K):
    """Phase index maximising ``cos(k w + alpha - mu)``; exact ties go to the smaller k.

    Vectorised over ``alpha``.
    """
    res = as_resolution(K)
    alpha = np.asarray(alpha, dtype=float)
    c = np.cos(res.omega * np.arange(res.K) + alpha[..., None] - mu_phase)
    best = c.max(axis=-1, keepdims=True)
    k = np.argmax(c >= best - 1e-12, axis=-1)
    return int(k) if k.ndim == 0 else k


def round_half_away(x):
    """``sgn(x) * floor(|x| + 0.5)``."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def upq_at_mu(ch: ChannelInstance, mu_phase: float, K) -> PhaseConfig:
    """Quantise ``mu - alpha_n`` to the nearest phase index."""
    res = as_resolution(K)
    k = round_half_away((mu_phase - ch.alpha) / res.omega).astype(np.int64) % res.K
    return PhaseConfig(k, res)


def upq(ch: ChannelInstance, K, reference: float = 0.0) -> PhaseConfig:
    """Uniform polar quantisation of the continuous optimum ``alpha0 - alpha_n``.

    Without a direct link ``alpha0`` is undefined and ``reference`` is used
    instead; every constant gives the same ``|g_c|``.
    """
    ref = ch.alpha0 if ch.has_direct else reference
    return upq_at_mu(ch, ref, K)


def solve_upq(ch: ChannelInstance, K) -> SolveResult:
    t0 = time.perf_counter()
    return _result(ch, upq(ch, K), 0, 0, t0, "upq")


def upq_residuals(ch: ChannelInstance, config: PhaseConfig, reference: float = 0.0) -> np.ndarray:
    """``theta_n - (alpha0 - alpha_n)`` mapped to ``(-pi, pi]``."""
    ref = ch.alpha0 if ch.has_direct else reference
    d = config.theta - (ref - ch.alpha)
    return np.pi - wrap_2pi(np.pi - d)


# ---------------------------------------------------------------------------
# Algorithm 1: full breakpoint sweep


def _breakpoint_table(ch: ChannelInstance, res: PhaseResolution):
    """Sorted flat breakpoint arrays and their tie clusters.

    Returns ``(lam, n, klab, cluster_start)`` where entry i is the crossing
    ``s_{n,klab}``; crossing it sets element n to index ``klab mod K``.
    """
    N, K = ch.N, res.K
    klab = np.tile(np.arange(1, K + 1), N)
    n = np.repeat(np.arange(N), K)
    lam = wrap_2pi(np.repeat(ch.alpha, K) + (klab - 0.5) * res.omega)
    order = np.argsort(lam, kind="stable")
    lam, n, klab = lam[order], n[order], klab[order]
    # a cluster that wraps past 2*pi joins the first one
    wrap = lam > TWO_PI - TIE_TOL
    if wrap.any() and not wrap.all():
        lam = np.concatenate([lam[wrap] - TWO_PI, lam[~wrap]])
        n = np.concatenate([n[wrap], n[~wrap]])
        klab = np.concatenate([klab[wrap], klab[~wrap]])
    new = np.empty(lam.size, dtype=bool)
    new[0] = True
    new[1:] = np.diff(lam) >= TIE_TOL
    starts = np.flatnonzero(new)
    return lam, n, klab, starts


def breakpoints(ch: ChannelInstance, K) -> list[Breakpoint]:
    """Distinct breakpoint phases in increasing order with their member elements."""
    res = as_resolution(K)
    lam, n, _, starts = _breakpoint_table(ch, res)
    ends = np.append(starts[1:], lam.size)
    return [Breakpoint(float(max(lam[s], 0.0)), tuple(sorted(n[s:e].tolist())))
            for s, e in zip(starts, ends)]


def algorithm1(ch: ChannelInstance, K) -> SolveResult:
    """Sweep all ``L`` distinct breakpoints starting from the arc containing ``mu = 0``."""
    t0 = time.perf_counter()
    res = as_resolution(K)
    K = res.K
    lam, n, klab, starts = _breakpoint_table(ch, res)
    L = starts.size

    # initial phase of each element: the one held before its first crossing
    first = np.full(ch.N, -1)
    first_pos = np.unique(n, return_index=True)[1]
    first[n[first_pos]] = klab[first_pos]
    k0 = (first - 1) % K

    roots = res.roots
    delta = ch.h[n] * (roots[klab % K] - roots[klab - 1])
    step = np.add.reduceat(delta, starts)
    g0 = ch.h0 + complex(np.dot(ch.h, roots[k0]))
    trace = np.empty(L, dtype=complex)
    trace[0] = g0
    trace[1:] = g0 + np.cumsum(step[:-1])
    best = _first_argmax(np.abs(trace))

    cut = starts[best] if best < L else lam.size
    counts = np.bincount(n[:cut], minlength=ch.N)
    config = PhaseConfig((k0 + counts) % K, res)
    return _result(ch, config, L - 1, best, t0, "algorithm1", trace)


# ---------------------------------------------------------------------------
# Algorithms 2 and 3: one window of crossings


def build_schedule(ch: ChannelInstance, K, mu0: float | None = None) -> SweepSchedule:
    """Visit order of the crossings met as ``mu`` advances one step past ``mu0``.

    The key of element n is its angular distance to its next breakpoint,
    ``(alpha_n - mu0 + pi/K) mod w``; elements whose keys tie share a
    breakpoint set and form one visit unit.  A key of 0 means the breakpoint
    sits on ``mu0`` itself: the element starts on the far side of it (the
    per-element rule at ``mu0`` with ties to the smaller index) and its next
    crossing closes the window, so such a unit is visited last.
    """
    res = as_resolution(K)
    w = res.omega
    if mu0 is None and ch.has_direct:
        mu0 = ch.alpha0 - math.pi / res.K
        # alpha0 differs from mu0 - pi/K by exactly one step; keeps exact ties exact
        phi = np.mod(ch.alpha - ch.alpha0, w)
        base = ch.alpha0 - w
    else:
        mu0 = 0.0 if mu0 is None else mu0
        base = mu0 - math.pi / res.K
        phi = np.mod(ch.alpha - base, w)
    on_mu0 = (phi < TIE_TOL) | (phi > w - TIE_TOL)
    phi[on_mu0] = 0.0
    reach = np.where(on_mu0, w, phi)
    initial = np.rint((base + reach - ch.alpha) / w).astype(np.int64) % res.K

    perm = np.argsort(reach, kind="stable")
    keys = reach[perm]
    new = np.ones(keys.size, dtype=bool)
    new[1:] = np.diff(keys) >= TIE_TOL
    starts = np.flatnonzero(new)
    steps = starts.size - (0 if ch.has_direct else 1)
    return SweepSchedule(perm, starts, phi[perm][starts], max(steps, 0), float(mu0), initial)


def _sweep(ch: ChannelInstance, res: PhaseResolution, sched: SweepSchedule, solver: str,
           t0: float) -> SolveResult:
    roots = res.roots
    k0 = sched.initial
    steps = sched.steps
    g0 = ch.h0 + complex(np.dot(ch.h, roots[k0]))
    trace = np.empty(steps + 1, dtype=complex)
    trace[0] = g0
    if steps:
        p = sched.perm
        kk = k0[p]
        delta = ch.h[p] * (roots[(kk + 1) % res.K] - roots[kk])
        unit = np.add.reduceat(delta, sched.starts) if sched.n_units < p.size else delta
        trace[1:] = g0 + np.cumsum(unit[:steps])
    best = _first_argmax(np.abs(trace))
    k = k0.copy()
    moved = sched.moved(best)
    k[moved] = (k[moved] + 1) % res.K
    return _result(ch, PhaseConfig(k, res), steps, best, t0, solver, trace)


def algorithm2(ch: ChannelInstance, K) -> SolveResult:
    """N-step sweep; requires all breakpoint sets distinct."""
    t0 = time.perf_counter()
    res = as_resolution(K)
    sched = build_schedule(ch, res)
    if sched.n_units != ch.N:
        raise DuplicatePhaseError(
            f"{ch.N - sched.n_units} elements share breakpoints with others; use algorithm3")
    return _sweep(ch, res, sched, "algorithm2", t0)


def algorithm3(ch: ChannelInstance, K) -> SolveResult:
    """Grouped sweep over the ``N - N'`` distinct breakpoint sets."""
    t0 = time.perf_counter()
    res = as_resolution(K)
    return _sweep(ch, res, build_schedule(ch, res), "algorithm3", t0)


# ---------------------------------------------------------------------------
# oracles


def _all_sums(h: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """``sum_i h_i roots[k_i]`` over every index vector, lexicographic order."""
    out = np.zeros(1, dtype=complex)
    for hi in h:
        out = (out[:, None] + hi * roots[None, :]).ravel()
    return out


def _hull_vertices(points: np.ndarray) -> np.ndarray:
    from scipy.spatial import ConvexHull, QhullError

    if points.size <= 8:
        return np.arange(points.size)
    try:
        hull = ConvexHull(np.column_stack([points.real, points.imag]))
    except QhullError:  # collinear or degenerate set
        return np.arange(points.size)
    return np.sort(hull.vertices)


def exhaustive_oracle(ch: ChannelInstance, K, budget: int = EXHAUSTIVE_BUDGET,
                      dense_limit: int = 2**18) -> SolveResult:
    """Exact maximiser of ``|g|^2`` over all ``K**N`` configurations.

    Elements are split into a head and a tail block and every (head, tail)
    pair is scored.  Above ``dense_limit`` configurations the tail sums are
    first reduced to their convex-hull vertices: ``|c + t|^2`` is strictly
    convex in ``t``, so for any fixed head ``c`` the maximum over the tail
    set is attained at a hull vertex.  Ties go to the lexicographically
    smallest index vector among the scored pairs.
    """
    t0 = time.perf_counter()
    res = as_resolution(K)
    K, N = res.K, ch.N
    if K**N > budget:
        raise OracleBudgetError(f"K**N = {K}**{N} exceeds the budget of {budget} evaluations")
    roots = res.roots
    tail_n = N - N // 2
    head_n = N - tail_n
    heads = ch.h0 + _all_sums(ch.h[:head_n], roots)
    tails = _all_sums(ch.h[head_n:], roots)
    cand = np.arange(tails.size) if K**N <= dense_limit else _hull_vertices(tails)
    tc = tails[cand]
    rows = max(1, 2**20 // tc.size)
    best_val, best_pair = -1.0, (0, 0)
    for s in range(0, heads.size, rows):
        p = np.abs(heads[s:s + rows, None] + tc[None, :]) ** 2
        i = int(np.argmax(p))
        r, c = divmod(i, tc.size)
        if p[r, c] > best_val:
            best_val, best_pair = p[r, c], (s + r, int(cand[c]))
    head_k = np.unravel_index(best_pair[0], (K,) * head_n) if head_n else ()
    tail_k = np.unravel_index(best_pair[1], (K,) * tail_n) if tail_n else ()
    k = np.array([int(v) for v in (*head_k, *tail_k)], dtype=np.int64)
    return _result(ch, PhaseConfig(k, res), K**N, 0, t0, "exhaustive")


def candidate_enum_oracle(ch: ChannelInstance, K) -> SolveResult:
    """Try ``mu`` on every breakpoint and pick phases by the per-element rule.

    Elements sitting exactly on the candidate breakpoint take the phase of
    the arc just before it. No sorting and no incremental updates: each
    candidate is evaluated from scratch, ``O(N^2 K)`` overall.
    """
    t0 = time.perf_counter()
    res = as_resolution(K)
    K, N = res.K, ch.N
    w = res.omega
    mus = (ch.alpha[:, None] + (np.arange(1, K + 1)[None, :] - 0.5) * w).ravel()
    best_val, best_k = -1.0, None
    chunk = max(1, 2**18 // max(1, N * K))
    kgrid = np.arange(K) * w
    for s in range(0, mus.size, chunk):
        mu = mus[s:s + chunk]
        arg = kgrid[None, None, :] + ch.alpha[None, :, None] - mu[:, None, None]
        c = np.cos(arg)
        top = c.max(axis=-1, keepdims=True)
        tied = c >= top - TIE_TOL
        # on a tie keep the candidate on the trailing side (residual -w/2)
        pick = tied & (np.sin(arg) < 0)
        has_pick = pick.any(axis=-1)
        k = np.where(has_pick, np.argmax(pick, axis=-1), np.argmax(tied, axis=-1))
        g = ch.h0 + (ch.h[None, :] * res.roots[k]).sum(axis=1)
        p = np.abs(g) ** 2
        i = int(np.argmax(p))
        if p[i] > best_val:
            best_val, best_k = p[i], k[i]
    steps = mus.size
    return _result(ch, PhaseConfig(best_k, res), steps, 0, t0, "candidate")


def certify(ch: ChannelInstance, result: SolveResult) -> bool:
    """Per-element rule at the realised direction ``angle(g)`` reproduces the config."""
    if abs(result.g) == 0:
        return True
    mu = float(np.angle(result.g))
    return bool(np.array_equal(lemma_select(ch.alpha, mu, result.config.K), result.config.k))


SOLVERS = {
    "algorithm1": algorithm1,
    "algorithm2": algorithm2,
    "algorithm3": algorithm3,
    "upq": solve_upq,
    "exhaustive": exhaustive_oracle,
    "candidate": candidate_enum_oracle,
}


def get_solver(name: str):
    try:
        return SOLVERS[name]
    except KeyError:
        raise ValueError(f"unknown solver {name!r}; choose from {sorted(SOLVERS)}") from None
