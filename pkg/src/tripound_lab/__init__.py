"""Conflict-constrained pairing: Tripound, its SAT reduction, counting and BAP notation."""

from .model import (
    Instance,
    InstanceError,
    Pairing,
    Verdict,
    check_pairing,
    format_pairing,
    parse_instance,
    serialize_instance,
)
from .tripound import (
    Infeasible,
    InsufficientFreeElements,
    TripoundTrace,
    feasibility_threshold,
    tripound_solve,
)

__version__ = "0.1.0"
