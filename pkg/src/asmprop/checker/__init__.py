"""Explicit-state verification: Kripke construction, CTL labeling, bounded LTL."""

from .compile import CompiledSpec
from .ctl import CheckStats, Trace, Verdict, check_ctl, check_invariant, label_states
from .kernels import get_backend, set_backend
from .kripke import (
    BuildStats,
    CheckerError,
    KripkeStructure,
    Limits,
    SpecNotWellTyped,
    StateLimitExceeded,
    TimeLimitExceeded,
    build_kripke,
)
from .ltl import check_ltl_bounded
from .verify import DEFAULT_LTL_BOUND, verify_spec

__all__ = [
    "BuildStats",
    "CheckStats",
    "CheckerError",
    "CompiledSpec",
    "DEFAULT_LTL_BOUND",
    "KripkeStructure",
    "Limits",
    "SpecNotWellTyped",
    "StateLimitExceeded",
    "TimeLimitExceeded",
    "Trace",
    "Verdict",
    "build_kripke",
    "check_ctl",
    "check_invariant",
    "check_ltl_bounded",
    "get_backend",
    "label_states",
    "set_backend",
    "verify_spec",
]
