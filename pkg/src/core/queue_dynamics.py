"""Queue updates, Lyapunov function and the bounds derived from a parameter set."""

import logging
import math
from typing import Optional

from core.errors import ParamsValidationError
from core.models import (
    UNBOUNDED,
    DerivedBounds,
    Params,
    SchedulerState,
    SlotObservation,
)

logger = logging.getLogger(__name__)

# Relative slack on floating-point inequality checks
DRIFT_SLACK = 1e-9


def _is_finite_non_negative(value: float) -> bool:
    return math.isfinite(value) and value >= 0


def validate_params(p: Params) -> Params:
    """Check every validity rule of a parameter set.

    Args:
        p: Parameters to validate

    Returns:
        The same parameters, unchanged

    Raises:
        ParamsValidationError: naming the first violated inequality
    """
    if not math.isfinite(p.V) or p.V <= 0:
        raise ParamsValidationError(f"V must be positive (got V={p.V})", rule="V > 0")

    for name in ("epsilon", "x_max", "a_max", "s_max", "gamma_max", "p_max"):
        value = getattr(p, name)
        if not _is_finite_non_negative(value):
            raise ParamsValidationError(
                f"{name} must be finite and non-negative (got {name}={value})",
                rule=f"{name} >= 0",
            )

    if p.x_max < p.a_max:
        raise ParamsValidationError(
            f"x_max < a_max ({p.x_max} < {p.a_max})", rule="x_max >= a_max"
        )
    if p.x_max < p.epsilon:
        raise ParamsValidationError(
            f"x_max < epsilon ({p.x_max} < {p.epsilon})", rule="x_max >= epsilon"
        )
    return p


def update_queue(Q: float, s: float, x: float, a: float) -> float:
    """Request backlog after one slot: max(Q - s - x, 0) + a."""
    return max(Q - s - x, 0.0) + a


def update_virtual_queue(Z: float, s: float, x: float, epsilon: float, q_positive: bool) -> float:
    """Virtual backlog after one slot.

    Grows by epsilon only on slots where the real queue was non-empty
    before service.
    """
    return max(Z - s - x + (epsilon if q_positive else 0.0), 0.0)


def lyapunov_value(state: SchedulerState) -> float:
    return 0.5 * (state.Q ** 2 + state.Z ** 2)


def derived_bounds(p: Params) -> DerivedBounds:
    """Drift constant, backlog/delay bounds and one-slot change limits."""
    service_max = p.s_max + p.x_max
    B = (service_max ** 2 + p.a_max ** 2) / 2.0 + max(p.epsilon ** 2, service_max ** 2) / 2.0
    Q_max = p.V * p.gamma_max + p.a_max
    Z_max = p.V * p.gamma_max + p.epsilon
    if p.epsilon > 0:
        D_max = int(math.ceil((2.0 * p.V * p.gamma_max + p.a_max + p.epsilon) / p.epsilon))
    else:
        D_max = UNBOUNDED
    return DerivedBounds(
        B=B,
        Q_max=Q_max,
        Z_max=Z_max,
        D_max=D_max,
        C_Q=max(service_max, p.a_max),
        C_Z=max(service_max, p.epsilon),
    )


def check_drift_inequality(before: SchedulerState, after: SchedulerState,
                           obs: SlotObservation, x: float, p: Params,
                           a: Optional[float] = None) -> bool:
    """Sample-path one-slot drift check.

    True iff L(after) - L(before) <= B + Q(a - s - x) + Z(epsilon - s - x).
    ``a`` overrides ``obs.a`` for runs where arrivals are realised by the
    policy (pricing mode).
    """
    arrivals = obs.a if a is None else a
    B = derived_bounds(p).B
    drift = lyapunov_value(after) - lyapunov_value(before)
    bound = (
        B
        + before.Q * (arrivals - obs.s - x)
        + before.Z * (p.epsilon - obs.s - x)
    )
    slack = DRIFT_SLACK * max(1.0, abs(drift), abs(bound))
    holds = drift <= bound + slack
    if not holds:
        logger.error(
            f"Drift inequality violated: drift={drift:.6g} bound={bound:.6g} "
            f"(Q={before.Q:g}, Z={before.Z:g})"
        )
    return holds
