#!/usr/bin/env python3
"""
FIFO batch tracker and delay statistics.
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from analysis.fifo_tracker import DelayStats, FifoTracker, apply_service, verify_delay_bound
from core.models import Params
from core.queue_dynamics import derived_bounds


class TestFifoTracker:

    def test_partial_service(self):
        tracker = FifoTracker()
        tracker.enqueue(1, 3.0)
        tracker.enqueue(2, 2.0)
        completed = apply_service(tracker, 2, 4.0)
        assert len(completed) == 1
        assert completed[0].arrival_slot == 1
        assert completed[0].delay == 1
        assert tracker.head().arrival_slot == 2
        assert tracker.head().remaining == 1.0

    def test_idle_slot(self):
        tracker = FifoTracker()
        tracker.enqueue(0, 3.0)
        assert tracker.apply_service(1, 0.0) == []
        assert tracker.pending_amount() == 3.0

    def test_zero_arrivals_create_no_batch(self):
        tracker = FifoTracker()
        assert tracker.enqueue(0, 0.0) is None
        assert tracker.head() is None

    def test_conservation_and_order(self):
        rng = np.random.default_rng(21)
        tracker = FifoTracker()
        enqueued = 0.0
        for slot in range(2000):
            tracker.apply_service(slot, float(rng.uniform(0, 120)))
            amount = float(rng.integers(0, 100))
            tracker.enqueue(slot, amount)
            enqueued += amount
            assert tracker.served_total + tracker.pending_amount() == pytest.approx(enqueued, rel=1e-9)
            started = sum(b.amount - b.remaining for b in tracker.pending)
            completed = sum(b.amount for b in tracker.stats.completed)
            assert completed + started == pytest.approx(tracker.served_total, rel=1e-9, abs=1e-6)
            assert tracker.total_remaining == pytest.approx(tracker.pending_amount(), abs=1e-6)

        arrivals = [b.arrival_slot for b in tracker.stats.completed]
        completions = [b.completion_slot for b in tracker.stats.completed]
        assert arrivals == sorted(arrivals)
        assert completions == sorted(completions)
        assert all(b.delay >= 1 for b in tracker.stats.completed)

    def test_partly_drained_head_counts_as_served(self):
        tracker = FifoTracker()
        tracker.enqueue(0, 5.0)
        tracker.enqueue(1, 4.0)
        tracker.apply_service(2, 7.0)
        assert tracker.stats.count == 1
        assert tracker.head().remaining == 2.0
        assert tracker.served_total == 7.0
        assert tracker.pending_amount() == 2.0
        # only the finished batch shows up in the delay record
        assert sum(b.amount for b in tracker.stats.completed) + tracker.pending_amount() == 7.0
        assert tracker.served_total + tracker.pending_amount() == 9.0

    def test_exact_service_completes_batch(self):
        tracker = FifoTracker()
        tracker.enqueue(0, 0.1)
        tracker.enqueue(0, 0.2)
        tracker.apply_service(1, 0.1 + 0.2)
        assert not tracker.pending
        assert tracker.total_remaining == 0.0


class TestDelayStats:

    def _stats(self, delays):
        tracker = FifoTracker()
        for slot, delay in enumerate(delays):
            tracker.enqueue(slot * 100, 1.0)
            tracker.apply_service(slot * 100 + delay, 1.0)
        return tracker.stats

    def test_summary(self):
        stats = self._stats([1, 2, 2, 5])
        assert stats.max_delay == 5
        assert stats.count == 4
        assert stats.mean_delay() == 2.5
        assert stats.percentile(50) == 2.0
        assert stats.summary()["completed_batches"] == 4

    def test_histogram_rows(self):
        rows = self._stats([1, 2, 2, 5]).histogram_rows()
        assert [r["delay_slots"] for r in rows] == [1, 2, 5]
        assert [r["count"] for r in rows] == [1, 2, 1]
        assert rows[1]["log10_count"] == pytest.approx(math.log10(2))

    def test_empty(self):
        stats = DelayStats()
        assert stats.mean_delay() == 0.0
        assert stats.percentile(99) == 0.0
        assert stats.histogram_rows() == []


class TestVerifyDelayBound:

    def test_within_bound(self, experiment_params):
        stats = DelayStats()
        assert verify_delay_bound(stats, derived_bounds(experiment_params))

    def test_exceeding_bound(self):
        params = Params(V=1.0, epsilon=4.0, x_max=4.0, a_max=4.0, s_max=0.0, gamma_max=0.0)
        bounds = derived_bounds(params)
        tracker = FifoTracker()
        tracker.enqueue(0, 1.0)
        tracker.apply_service(bounds.D_max + 1, 1.0)
        assert not verify_delay_bound(tracker.stats, bounds)

    def test_unbounded_always_passes(self, experiment_params):
        tracker = FifoTracker()
        tracker.enqueue(0, 1.0)
        tracker.apply_service(10_000, 1.0)
        assert verify_delay_bound(tracker.stats, derived_bounds(replace(experiment_params, epsilon=0.0)))
