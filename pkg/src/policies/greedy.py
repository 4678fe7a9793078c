"""
"Purchase at deadline" baseline.

Serves pending batches from renewable supply only and buys from the spot
market solely for a batch that has reached its deadline.
"""

import logging
from dataclasses import dataclass, field
from typing import Tuple

from analysis.fifo_tracker import FifoTracker
from core.models import Params, SlotObservation, SlotOutcome

logger = logging.getLogger(__name__)


@dataclass
class GreedyPolicy:
    """Single-owner greedy policy; ``tracker`` holds the FIFO batches."""
    deadline: int
    tracker: FifoTracker = field(default_factory=FifoTracker)
    slot: int = 0
    supply_served_total: float = 0.0
    purchased_total: float = 0.0
    x_max_excess_slots: int = 0

    def __post_init__(self):
        if self.deadline < 1:
            raise ValueError(f"greedy deadline must be >= 1 (got {self.deadline})")

    def step(self, obs: SlotObservation, p: Params) -> SlotOutcome:
        slot = self.slot
        backlog = self.tracker.total_remaining

        supply_used = min(backlog, obs.s)
        self.tracker.apply_service(slot, supply_used)

        purchase = 0.0
        deadline_hit = False
        head = self.tracker.head()
        while head is not None and slot - head.arrival_slot >= self.deadline:
            deadline_hit = True
            purchase += head.remaining
            self.tracker.apply_service(slot, head.remaining)
            head = self.tracker.head()

        x_max_excess = purchase > p.x_max
        if x_max_excess:
            self.x_max_excess_slots += 1
            logger.warning(
                f"⚠️  Slot {slot}: forced purchase {purchase:g} exceeds x_max={p.x_max:g}"
            )

        self.tracker.enqueue(slot, obs.a)
        self.supply_served_total += supply_used
        self.purchased_total += purchase
        self.slot += 1

        return SlotOutcome(
            slot=slot,
            x=purchase,
            x_actual=purchase,
            cost=obs.gamma * purchase,
            cost_x=obs.gamma * purchase,
            served=supply_used + purchase,
            a=obs.a,
            deadline_hit=deadline_hit,
            x_max_excess=x_max_excess,
        )

    @property
    def pending(self):
        return self.tracker.pending


def greedy_step(policy: GreedyPolicy, obs: SlotObservation, p: Params) -> Tuple[GreedyPolicy, SlotOutcome]:
    """Functional form of ``GreedyPolicy.step``."""
    outcome = policy.step(obs, p)
    return policy, outcome
