"""Domain types, queue dynamics and derived bounds."""

from core.errors import (
    EnergySimError,
    InfeasibleFrameError,
    ParamsValidationError,
    TraceBoundsError,
    TraceFormatError,
)
from core.models import (
    UNBOUNDED,
    DerivedBounds,
    Params,
    SchedulerState,
    SlotObservation,
    SlotOutcome,
    Unbounded,
)
from core.queue_dynamics import (
    check_drift_inequality,
    derived_bounds,
    lyapunov_value,
    update_queue,
    update_virtual_queue,
    validate_params,
)

__all__ = [
    "EnergySimError",
    "InfeasibleFrameError",
    "ParamsValidationError",
    "TraceBoundsError",
    "TraceFormatError",
    "UNBOUNDED",
    "DerivedBounds",
    "Params",
    "SchedulerState",
    "SlotObservation",
    "SlotOutcome",
    "Unbounded",
    "check_drift_inequality",
    "derived_bounds",
    "lyapunov_value",
    "update_queue",
    "update_virtual_queue",
    "validate_params",
]
