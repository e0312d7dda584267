"""skini: an interactive structured-music engine.

A deterministic synchronous reactive kernel executes composer-authored
scores (patterns organized into groups and tanks along a musical path) while
an audience, live over WebSocket or simulated, selects the patterns that get
queued per instrument and rendered to a CSV event log or MIDI file.
"""

from .errors import (
    CausalityError,
    DoubleEmission,
    MachineTerminated,
    SkiniError,
    ValidationError,
)
from .machine import ReactionResult, ReactiveMachine, machine_from_modules
from .runtime import Performance
from .score import Score, load_score
from .simulator import SimulatorConfig
from .simulator import run as simulate

__version__ = "0.1.0"

__all__ = [
    "CausalityError",
    "DoubleEmission",
    "MachineTerminated",
    "Performance",
    "ReactionResult",
    "ReactiveMachine",
    "Score",
    "SkiniError",
    "SimulatorConfig",
    "ValidationError",
    "load_score",
    "machine_from_modules",
    "simulate",
    "__version__",
]
