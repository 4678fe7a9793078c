"""
Threshold energy-allocation policy.

Every slot the plant compares the combined backlog Q + Z with V times the
current spot price and either buys nothing or buys the full cap x_max.
Only the shortfall left after renewable supply is actually purchased.
"""

import logging
from dataclasses import dataclass, field
from typing import Tuple

from core.models import Params, SchedulerState, SlotObservation, SlotOutcome
from core.queue_dynamics import update_queue, update_virtual_queue, validate_params

logger = logging.getLogger(__name__)


def decide_purchase(state: SchedulerState, gamma: float, p: Params) -> float:
    """Bang-bang purchase decision; ties at Q + Z == V*gamma buy nothing."""
    if state.Q + state.Z <= p.V * gamma:
        return 0.0
    return p.x_max


def actual_purchase(Q: float, s: float, x: float) -> float:
    """Energy truly bought: the shortfall Q - s, clamped to [0, x]."""
    return min(max(Q - s, 0.0), x)


@dataclass
class AllocatorPolicy:
    """Single-owner allocation policy with its own queue state."""
    params: Params
    state: SchedulerState = field(default_factory=SchedulerState)
    slot: int = 0

    def __post_init__(self):
        validate_params(self.params)

    def step(self, obs: SlotObservation) -> SlotOutcome:
        """Advance both queues by one slot and return its outcome."""
        Q, Z = self.state.Q, self.state.Z
        x = decide_purchase(self.state, obs.gamma, self.params)
        x_actual = actual_purchase(Q, obs.s, x)
        served = min(Q, obs.s + x)

        self.state = SchedulerState(
            Q=update_queue(Q, obs.s, x, obs.a),
            Z=update_virtual_queue(Z, obs.s, x, self.params.epsilon, Q > 0),
        )
        outcome = SlotOutcome(
            slot=self.slot,
            x=x,
            x_actual=x_actual,
            cost=obs.gamma * x_actual,
            cost_x=obs.gamma * x,
            served=served,
            a=obs.a,
        )
        self.slot += 1
        return outcome


def step(policy: AllocatorPolicy, obs: SlotObservation) -> Tuple[AllocatorPolicy, SlotOutcome]:
    """Functional form of ``AllocatorPolicy.step``."""
    outcome = policy.step(obs)
    return policy, outcome
