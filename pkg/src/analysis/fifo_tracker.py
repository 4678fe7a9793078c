"""
FIFO batch tracker.

Follows every arrival batch through first-in-first-out service so the
per-request delay of a run can be measured and compared against the
worst-case delay bound.
"""

import logging
import math
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Deque, Dict, List, NamedTuple, Optional

import numpy as np

from core.models import DerivedBounds

logger = logging.getLogger(__name__)

# Residual below which a batch counts as fully served
COMPLETION_TOLERANCE = 1e-9


@dataclass
class ArrivalBatch:
    """Requests that arrived together on one slot"""
    arrival_slot: int
    amount: float
    remaining: float


class CompletedBatch(NamedTuple):
    arrival_slot: int
    completion_slot: int
    delay: int
    amount: float


@dataclass
class DelayStats:
    """Per-batch delays of a finished (or running) simulation"""
    completed: List[CompletedBatch] = field(default_factory=list)
    max_delay: int = 0
    histogram: Counter = field(default_factory=Counter)

    def record(self, batch: CompletedBatch):
        self.completed.append(batch)
        self.histogram[batch.delay] += 1
        if batch.delay > self.max_delay:
            self.max_delay = batch.delay

    @property
    def count(self) -> int:
        return len(self.completed)

    def mean_delay(self) -> float:
        if not self.completed:
            return 0.0
        return float(np.mean([b.delay for b in self.completed]))

    def percentile(self, q: float) -> float:
        if not self.completed:
            return 0.0
        return float(np.percentile([b.delay for b in self.completed], q))

    def histogram_rows(self) -> List[Dict[str, float]]:
        """Histogram rows sorted by delay, with a log10 column for log-scale plots."""
        return [
            {
                "delay_slots": delay,
                "count": count,
                "log10_count": math.log10(count),
            }
            for delay, count in sorted(self.histogram.items())
        ]

    def summary(self) -> Dict[str, float]:
        return {
            "completed_batches": self.count,
            "max_delay": self.max_delay,
            "mean_delay": round(self.mean_delay(), 3),
            "p95_delay": self.percentile(95),
            "p99_delay": self.percentile(99),
        }


class FifoTracker:
    """Tracks arrival batches through FIFO service."""

    def __init__(self):
        self.pending: Deque[ArrivalBatch] = deque()
        self.stats = DelayStats()
        self.enqueued_total = 0.0
        self.completed_total = 0.0
        self.served_total = 0.0  # includes the served part of unfinished batches
        self.total_remaining = 0.0

    def enqueue(self, slot: int, amount: float) -> Optional[ArrivalBatch]:
        """Add the arrivals of ``slot``; zero arrivals create no batch."""
        if amount <= 0:
            return None
        batch = ArrivalBatch(arrival_slot=slot, amount=amount, remaining=amount)
        self.pending.append(batch)
        self.enqueued_total += amount
        self.total_remaining += amount
        return batch

    def apply_service(self, slot: int, amount: float) -> List[CompletedBatch]:
        """Drain ``amount`` units front-first; returns batches completed this slot."""
        completed = []
        budget = amount
        while self.pending and budget > 0:
            head = self.pending[0]
            used = min(head.remaining, budget)
            head.remaining -= used
            budget -= used
            self.total_remaining -= used
            self.served_total += used
            if head.remaining <= COMPLETION_TOLERANCE * max(1.0, head.amount):
                self.total_remaining -= head.remaining
                self.served_total += head.remaining
                head.remaining = 0.0
                self.pending.popleft()
                done = CompletedBatch(
                    arrival_slot=head.arrival_slot,
                    completion_slot=slot,
                    delay=slot - head.arrival_slot,
                    amount=head.amount,
                )
                self.completed_total += head.amount
                self.stats.record(done)
                completed.append(done)
        if not self.pending:
            self.total_remaining = 0.0
        return completed

    def head(self) -> Optional[ArrivalBatch]:
        return self.pending[0] if self.pending else None

    def pending_amount(self) -> float:
        return sum(batch.remaining for batch in self.pending)


def apply_service(tracker: FifoTracker, slot: int, amount: float) -> List[CompletedBatch]:
    return tracker.apply_service(slot, amount)


def verify_delay_bound(stats: DelayStats, bounds: DerivedBounds) -> bool:
    """True iff every completed batch met the worst-case delay bound.

    Trivially true when the bound is unbounded (epsilon = 0).
    """
    if not bounds.delay_bounded:
        return True
    holds = stats.max_delay <= bounds.D_max
    if not holds:
        logger.error(f"❌ Observed delay {stats.max_delay} exceeds D_max={bounds.D_max}")
    return holds
