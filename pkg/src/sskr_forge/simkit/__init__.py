"""Simulation kit: spec compilation, fixed-step solvers, document export."""

from .compile import (
    BLOWUP_LIMIT,
    ExecutableModel,
    NumericalBlowup,
    UnresolvedParameter,
    UnsupportedFramework,
    UnsupportedPde,
    compile,
)
from .document import emit_simulation_document
from .solve import (
    SCHEME_NAMES,
    SOLVERS,
    InvalidConfig,
    SimConfig,
    Trajectory,
    simulate,
    to_csv,
)

__all__ = [
    "BLOWUP_LIMIT",
    "ExecutableModel",
    "InvalidConfig",
    "NumericalBlowup",
    "SCHEME_NAMES",
    "SOLVERS",
    "SimConfig",
    "Trajectory",
    "UnresolvedParameter",
    "UnsupportedFramework",
    "UnsupportedPde",
    "compile",
    "emit_simulation_document",
    "simulate",
    "to_csv",
]
