"""Geometric Rician channel generation and reductions onto the SISO problem.

Path losses are given in dB and applied as linear amplitude ``10**(-PL/20)``.
Random draws go through Philox generators keyed by ``(seed, trial, link)``
so a trial's channels never depend on which worker produced them.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .phase import ChannelInstance, PhaseConfig, as_resolution

KAPPA_LOS = 1e12

# stream ids used with trial_rng()
LINK_BS_RIS = 0
LINK_RIS_UE = 1
LINK_DIRECT = 2


@dataclass(frozen=True)
class RisGeometry:
    N_y: int
    N_z: int
    d_y: float = 0.5  # spacing in wavelengths
    d_z: float = 0.5

    def __post_init__(self):
        if self.N_y < 1 or self.N_z < 1:
            raise ValueError("N_y and N_z must be >= 1")
        if self.d_y > 0.5 or self.d_z > 0.5:
            raise ValueError("element spacing must not exceed half a wavelength")

    @property
    def N(self) -> int:
        return self.N_y * self.N_z

    @classmethod
    def square(cls, N: int) -> "RisGeometry":
        """Most-square factorisation ``N_y >= N_z`` of ``N``."""
        nz = int(np.sqrt(N))
        while N % nz:
            nz -= 1
        return cls(N // nz, nz)


@dataclass(frozen=True)
class ScenarioConfig:
    ris_position: tuple = (-2.0, -1.0, 0.0)
    bs_position: tuple = (50.0, -200.0, 20.0)
    ue_position: tuple = (0.0, 0.0, 0.0)
    kappa: float = 0.0
    tx_power_dbm: float = 30.0
    noise_power_dbm: float = -90.0
    direct_link_blocked: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError(f"Rician factor must be nonnegative, got {self.kappa}")
        for name in ("ris_position", "bs_position", "ue_position"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))

    @property
    def d_b(self) -> float:
        return float(np.linalg.norm(np.subtract(self.bs_position, self.ris_position)))

    @property
    def d_u(self) -> float:
        return float(np.linalg.norm(np.subtract(self.ue_position, self.ris_position)))

    @property
    def d_0(self) -> float:
        return float(np.linalg.norm(np.subtract(self.ue_position, self.bs_position)))

    def replace(self, **kw) -> "ScenarioConfig":
        d = asdict(self)
        d.update(kw)
        return ScenarioConfig(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        for name in ("ris_position", "bs_position", "ue_position"):
            d[name] = list(d[name])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        return cls(**d)


def load_scenario(path) -> ScenarioConfig:
    """Read a JSON scenario file whose keys mirror ``ScenarioConfig`` fields."""
    return ScenarioConfig.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class MisoInstance:
    C: np.ndarray  # N x M, column m is the steering vector of BS antenna m
    x: np.ndarray  # M transmit beamformer
    b: np.ndarray  # N, conj of the UE-side steering vector

    @classmethod
    def from_angles(cls, geom: RisGeometry, bs_angles, ue_angle, x) -> "MisoInstance":
        C = np.stack([array_response(geom, th, ph) for th, ph in bs_angles], axis=1)
        b = np.conj(array_response(geom, *ue_angle))
        return cls(C, np.asarray(x, dtype=complex), b)


def trial_rng(seed: int, trial: int, link: int) -> np.random.Generator:
    """Counter-based generator for one link of one trial."""
    ss = np.random.SeedSequence([int(seed) & (2**64 - 1), int(trial), int(link)])
    return np.random.Generator(np.random.Philox(ss))


def complex_normal(rng: np.random.Generator, size=None):
    """Standard circular complex Gaussian, ``E|z|^2 = 1``."""
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)


def path_loss_ris_db(d: float) -> float:
    return 30.0 + 22.0 * np.log10(d)


def path_loss_direct_db(d: float) -> float:
    return 32.6 + 36.7 * np.log10(d)


def db_to_amplitude(pl_db: float) -> float:
    return 10.0 ** (-pl_db / 20.0)


def array_response(geom: RisGeometry, elevation: float, azimuth: float) -> np.ndarray:
    m = np.arange(geom.N_y)
    n = np.arange(geom.N_z)
    a_y = np.exp(-2j * np.pi * m * geom.d_y * np.sin(elevation) * np.sin(azimuth))
    a_z = np.exp(-2j * np.pi * n * geom.d_z * np.cos(elevation))
    return np.kron(a_y, a_z)


def spherical_angles(displacement) -> tuple[float, float]:
    v = np.asarray(displacement, dtype=float)
    r = np.linalg.norm(v)
    if r == 0:
        raise ValueError("zero displacement has no direction")
    return float(np.arccos(np.clip(v[2] / r, -1.0, 1.0))), float(np.arctan2(v[1], v[0]))


def aoa_from_geometry(scenario: ScenarioConfig) -> dict:
    """Elevation/azimuth of BS and UE seen from the RIS (board in the y-z plane)."""
    ris = np.asarray(scenario.ris_position)
    return {
        "bs": spherical_angles(np.asarray(scenario.bs_position) - ris),
        "ue": spherical_angles(np.asarray(scenario.ue_position) - ris),
    }


def rician_channel(geom: RisGeometry, scenario: ScenarioConfig, link: str,
                   rng: np.random.Generator | None = None) -> np.ndarray:
    """Per-element Rician channel of the ``"bs"`` (BS-RIS) or ``"ue"`` (RIS-UE) link."""
    kappa = scenario.kappa
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    if link == "bs":
        d = scenario.d_b
    elif link == "ue":
        d = scenario.d_u
    else:
        raise ValueError(f"unknown link {link!r}")
    if d <= 0:
        raise ValueError("link distance must be positive")
    amp = db_to_amplitude(path_loss_ris_db(d))
    los = array_response(geom, *aoa_from_geometry(scenario)[link])
    if kappa >= KAPPA_LOS:
        return amp * los
    nlos = complex_normal(rng, geom.N)
    return amp * (np.sqrt(kappa / (1 + kappa)) * los + np.sqrt(1 / (1 + kappa)) * nlos)


def direct_link(scenario: ScenarioConfig, rng: np.random.Generator | None = None) -> complex:
    if scenario.direct_link_blocked:
        return 0j
    d0 = scenario.d_0
    if d0 <= 0:
        raise ValueError("BS-UE distance must be positive")
    return complex(db_to_amplitude(path_loss_direct_db(d0)) * complex_normal(rng))


def cascade(h_u, h_b) -> np.ndarray:
    h_u = np.asarray(h_u, dtype=complex)
    h_b = np.asarray(h_b, dtype=complex)
    if h_u.shape != h_b.shape:
        raise ValueError(f"shape mismatch {h_u.shape} vs {h_b.shape}")
    return np.conj(h_u) * h_b


def draw_channel(geom: RisGeometry, scenario: ScenarioConfig, trial: int = 0) -> ChannelInstance:
    """One SISO realization for ``trial`` of ``scenario.seed``."""
    seed = scenario.seed
    h_b = rician_channel(geom, scenario, "bs", trial_rng(seed, trial, LINK_BS_RIS))
    h_u = rician_channel(geom, scenario, "ue", trial_rng(seed, trial, LINK_RIS_UE))
    h0 = direct_link(scenario, trial_rng(seed, trial, LINK_DIRECT))
    return ChannelInstance(h0, cascade(h_u, h_b))


def miso_reduce(m: MisoInstance) -> ChannelInstance:
    """Rank-one MISO power ``w^H Q w`` as an equivalent SISO cascade with ``h0 = 0``."""
    C = np.asarray(m.C, dtype=complex)
    x = np.asarray(m.x, dtype=complex).reshape(-1)
    b = np.asarray(m.b, dtype=complex).reshape(-1)
    if C.ndim != 2 or C.shape[1] != x.size or C.shape[0] != b.size:
        raise ValueError(f"inconsistent MISO dimensions C{C.shape}, x{x.shape}, b{b.shape}")
    return ChannelInstance(0j, (C @ x) * b)


def miso_q_matrix(m: MisoInstance) -> np.ndarray:
    """Explicit ``Q = P^T * R`` (Hadamard), with ``P = C x x^H C^H`` and ``R = b^H b``."""
    u = np.asarray(m.C) @ np.asarray(m.x)
    P = np.outer(u, np.conj(u))
    b = np.asarray(m.b).reshape(1, -1)
    R = np.conj(b).T @ b
    return P.T * R


def p2_augment(ch: ChannelInstance) -> ChannelInstance:
    """Fold the direct link in as element N+1 of a blocked-direct instance."""
    return ChannelInstance(0j, np.append(ch.h, ch.h0))


def p2_extract(config: PhaseConfig) -> PhaseConfig:
    """Map an augmented (N+1)-phase solution back to N phases relative to the last one."""
    k = (config.k[:-1] - config.k[-1]) % config.K
    return PhaseConfig(k, as_resolution(config.resolution))


@dataclass
class ChannelPerturbation:
    """Additive complex Gaussian error on each cascaded coefficient.

    Plumbing for imperfect-CSI studies: the solver sees ``estimate()``, the
    metrics are evaluated on the true channel.
    """

    error_std: float = 0.0
    rng: np.random.Generator = field(default_factory=np.random.default_rng)

    def estimate(self, ch: ChannelInstance) -> ChannelInstance:
        if self.error_std == 0:
            return ch
        err = self.error_std * complex_normal(self.rng, ch.N + 1)
        h0 = ch.h0 + err[0] if ch.has_direct else 0j
        return ChannelInstance(h0, ch.h + err[1:])
