"""Toolchain for the Compact Satellite Model (CSM) language."""

__version__ = "0.1.0"

from .interp import (  # noqa: E402
    Configuration,
    RejectionCause,
    TimedTelecommand,
    Verdict,
    enumerate_min_errors,
    initial_configuration,
    verify,
    verify_event,
    verify_from,
)
from .model import Model, ModelError, validate_model  # noqa: E402
from .parser import ParseError, parse_csm, print_csm  # noqa: E402

__all__ = [
    "Configuration",
    "Model",
    "ModelError",
    "ParseError",
    "RejectionCause",
    "TimedTelecommand",
    "Verdict",
    "enumerate_min_errors",
    "initial_configuration",
    "parse_csm",
    "print_csm",
    "validate_model",
    "verify",
    "verify_event",
    "verify_from",
]
