"""Discrete phase arithmetic and channel containers shared by every solver.

Phases are carried as integer indices ``k`` into the K-ary set
``{0, w, 2w, ..., (K-1)w}`` with ``w = 2*pi/K``; radians only appear inside
the complex exponentials, through a per-resolution table of unit roots.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * np.pi


def wrap_2pi(x):
    """Reduce angles to ``[0, 2*pi)``; guards the ``np.mod`` result of exactly 2*pi."""
    a = np.mod(x, TWO_PI)
    return np.where(a >= TWO_PI, 0.0, a)


@dataclass(frozen=True)
class PhaseResolution:
    K: int

    def __post_init__(self):
        if int(self.K) != self.K or self.K < 2:
            raise ValueError(f"K must be an integer >= 2, got {self.K!r}")
        object.__setattr__(self, "K", int(self.K))

    @property
    def omega(self) -> float:
        return TWO_PI / self.K

    @cached_property
    def roots(self) -> np.ndarray:
        """``exp(1j*k*omega)`` for k = 0..K-1."""
        r = np.exp(1j * self.omega * np.arange(self.K))
        r.setflags(write=False)
        return r

    def radians(self, k) -> np.ndarray:
        return np.asarray(k) * self.omega


def as_resolution(K) -> PhaseResolution:
    return K if isinstance(K, PhaseResolution) else PhaseResolution(K)


@dataclass(frozen=True)
class PhaseConfig:
    k: np.ndarray
    resolution: PhaseResolution

    def __post_init__(self):
        k = np.array(self.k, dtype=np.int64).reshape(-1)
        if k.size and (k.min() < 0 or k.max() >= self.resolution.K):
            raise ValueError(f"phase indices must lie in [0, {self.resolution.K - 1}]")
        k.setflags(write=False)
        object.__setattr__(self, "k", k)

    @property
    def K(self) -> int:
        return self.resolution.K

    @property
    def theta(self) -> np.ndarray:
        return self.resolution.radians(self.k)

    @property
    def weights(self) -> np.ndarray:
        """RIS reflection vector ``exp(1j*theta)``."""
        return self.resolution.roots[self.k]

    def __len__(self):
        return self.k.size

    def __eq__(self, other):
        if not isinstance(other, PhaseConfig):
            return NotImplemented
        return self.K == other.K and np.array_equal(self.k, other.k)

    def __hash__(self):
        return hash((self.K, self.k.tobytes()))

    @classmethod
    def zeros(cls, N: int, K) -> "PhaseConfig":
        return cls(np.zeros(N, dtype=np.int64), as_resolution(K))


class ChannelInstance:
    """Direct link ``h0`` plus cascaded per-element coefficients ``h[n]``.

    ``beta``/``alpha`` are the polar views of ``h`` with ``alpha`` in ``[0, 2*pi)``.
    """

    __slots__ = ("h0", "h", "beta", "alpha", "beta0", "alpha0")

    def __init__(self, h0, h):
        h = np.array(h, dtype=np.complex128).reshape(-1)
        h.setflags(write=False)
        self.h0 = complex(h0)
        self.h = h
        self.beta = np.abs(h)
        self.alpha = wrap_2pi(np.angle(h))
        self.beta0 = abs(self.h0)
        self.alpha0 = float(wrap_2pi(np.angle(self.h0)))
        for a in (self.beta, self.alpha):
            a.setflags(write=False)

    @classmethod
    def from_polar(cls, beta0, alpha0, beta, alpha) -> "ChannelInstance":
        beta = np.asarray(beta, dtype=float)
        alpha = np.asarray(alpha, dtype=float)
        return cls(beta0 * np.exp(1j * alpha0), beta * np.exp(1j * alpha))

    @property
    def N(self) -> int:
        return self.h.size

    @property
    def has_direct(self) -> bool:
        return self.h0 != 0

    def __len__(self):
        return self.N

    def __repr__(self):
        return f"ChannelInstance(N={self.N}, h0={self.h0:.4g})"


@dataclass
class GainAccumulator:
    """Running received field ``g = h0 + gc``; mutated in place by ``incremental_update``."""

    g: complex
    gc: complex
    updates: int = field(default=0)

    @classmethod
    def start(cls, ch: ChannelInstance, config: PhaseConfig) -> "GainAccumulator":
        gc = complex(np.dot(ch.h, config.weights))
        return cls(ch.h0 + gc, gc)

    @property
    def h0(self) -> complex:
        return self.g - self.gc

    @property
    def power(self) -> float:
        return abs(self.g) ** 2

    @property
    def mu_phase(self) -> float:
        return float(wrap_2pi(np.angle(self.g)))


def _check_length(ch: ChannelInstance, config: PhaseConfig):
    if len(config) != ch.N:
        raise ValueError(f"config has {len(config)} phases but channel has N={ch.N}")


def phase_step(config: PhaseConfig, n: int, delta: int = 1) -> PhaseConfig:
    if not 0 <= n < len(config):
        raise IndexError(f"element {n} out of range for N={len(config)}")
    k = config.k.copy()
    k[n] = (k[n] + delta) % config.K
    return PhaseConfig(k, config.resolution)


def evaluate_gain(ch: ChannelInstance, config: PhaseConfig) -> tuple[complex, float]:
    """Return ``g = h0 + sum h_n exp(j k_n w)`` and ``|g|^2``."""
    _check_length(ch, config)
    g = ch.h0 + complex(np.dot(ch.h, config.weights))
    return g, abs(g) ** 2


def incremental_update(acc: GainAccumulator, ch: ChannelInstance, n: int, old_k: int, new_k: int,
                       resolution: PhaseResolution) -> GainAccumulator:
    if not 0 <= n < ch.N:
        raise IndexError(f"element {n} out of range for N={ch.N}")
    roots = resolution.roots
    d = ch.h[n] * (roots[new_k % resolution.K] - roots[old_k % resolution.K])
    acc.g += d
    acc.gc += d
    acc.updates += 1
    return acc
