"""Boolean Algebraic Program notation: parser, printer and interpreter."""

from importlib.resources import files

from .ast import BapProgram
from .errors import (
    BapError,
    BapRuntimeError,
    BapSyntaxError,
    IndexOutOfBounds,
    StepCapExceeded,
    UndefinedMatrix,
    UndefinedOperator,
)
from .interp import (
    DEFAULT_STEP_CAP,
    BapState,
    Matrix,
    pairing_from_state,
    run_bap,
    state_from_instance,
)
from .parser import format_program, parse_bap


def bundled_tripound_source() -> str:
    return files(__package__).joinpath("tripound.bap").read_text(encoding="utf-8")


def bundled_tripound() -> BapProgram:
    return parse_bap(bundled_tripound_source(), matrices=("S", "I", "D", "F"))


__all__ = [
    "BapError",
    "BapProgram",
    "BapRuntimeError",
    "BapState",
    "BapSyntaxError",
    "DEFAULT_STEP_CAP",
    "IndexOutOfBounds",
    "Matrix",
    "StepCapExceeded",
    "UndefinedMatrix",
    "UndefinedOperator",
    "bundled_tripound",
    "bundled_tripound_source",
    "format_program",
    "pairing_from_state",
    "parse_bap",
    "run_bap",
    "state_from_instance",
]
