"""Globally optimal K-ary phase selection for RIS-aided received power."""
from .phase import ChannelInstance, GainAccumulator, PhaseConfig, PhaseResolution, evaluate_gain
from .solvers import (
    SolveResult,
    algorithm1,
    algorithm2,
    algorithm3,
    candidate_enum_oracle,
    exhaustive_oracle,
    upq,
)

__all__ = [
    "ChannelInstance",
    "GainAccumulator",
    "PhaseConfig",
    "PhaseResolution",
    "SolveResult",
    "algorithm1",
    "algorithm2",
    "algorithm3",
    "candidate_enum_oracle",
    "evaluate_gain",
    "exhaustive_oracle",
    "upq",
]
