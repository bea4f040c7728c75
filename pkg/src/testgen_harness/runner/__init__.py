"""Build-phase execution and compilation-error taxonomy."""

from .diagnostics import (
    CATEGORIES,
    GROUPS,
    CompilationError,
    ErrorCategory,
    ErrorProfile,
    classify_error,
    error_profile,
    parse_diagnostics,
)
from .phases import DEFAULT_TIMEOUTS, PHASES, BuildRun, PhaseTarget, ReplayStore, run_phase

__all__ = [
    "CATEGORIES",
    "DEFAULT_TIMEOUTS",
    "GROUPS",
    "PHASES",
    "BuildRun",
    "CompilationError",
    "ErrorCategory",
    "ErrorProfile",
    "PhaseTarget",
    "ReplayStore",
    "classify_error",
    "error_profile",
    "parse_diagnostics",
    "run_phase",
]
