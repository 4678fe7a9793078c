#!/usr/bin/env python3
"""
models.py

Purpose:
  Data models for the renewable energy allocation simulator.
  Defines slot observations, algorithm parameters, queue state, derived
  bounds and per-slot outcomes shared by every policy.

Version: 1.0.0
"""

from dataclasses import dataclass, asdict
from typing import Any, Dict, Optional, Union


@dataclass(frozen=True)
class Unbounded:
    """Marker for a delay bound that does not exist (epsilon = 0)."""

    def __str__(self) -> str:
        return "unbounded"


UNBOUNDED = Unbounded()

DelayBound = Union[int, Unbounded]


@dataclass(frozen=True)
class SlotObservation:
    """Exogenous inputs of one slot"""
    s: float  # renewable supply
    a: float  # requests arriving
    gamma: float  # spot market price per unit
    y: Optional[float] = None  # demand state, pricing mode only


@dataclass(frozen=True)
class Params:
    """Algorithm configuration"""
    V: float
    epsilon: float
    x_max: float
    a_max: float
    s_max: float
    gamma_max: float
    p_max: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class SchedulerState:
    """Real backlog Q and virtual backlog Z"""
    Q: float = 0.0
    Z: float = 0.0


@dataclass(frozen=True)
class DerivedBounds:
    """Constants and worst-case bounds implied by a parameter set.

    ``B`` is the one-slot drift constant, ``Q_max``/``Z_max`` the
    deterministic backlog bounds, ``D_max`` the worst-case delay in slots
    and ``C_Q``/``C_Z`` the largest one-slot change of each queue.
    """
    B: float
    Q_max: float
    Z_max: float
    D_max: DelayBound
    C_Q: float
    C_Z: float

    @property
    def delay_bounded(self) -> bool:
        return not isinstance(self.D_max, Unbounded)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["D_max"] = str(self.D_max) if not self.delay_bounded else self.D_max
        return data


@dataclass(frozen=True)
class SlotOutcome:
    """Decisions and accounting of one simulated slot.

    ``cost`` is what the operator pays (gamma times the actual purchase);
    ``cost_x`` is gamma times the decision variable, the quantity the
    performance guarantees are stated on.
    """
    slot: int
    x: float
    x_actual: float
    cost: float
    cost_x: float
    served: float
    a: float
    b: Optional[int] = None
    p: Optional[float] = None
    profit: Optional[float] = None
    profit_actual: Optional[float] = None
    deadline_hit: bool = False  # greedy only: a batch reached its deadline
    x_max_excess: bool = False  # greedy only: forced purchase above x_max
