#!/usr/bin/env python3
"""
Threshold allocation policy.
"""

import itertools

import numpy as np
import pytest

from core.errors import ParamsValidationError
from core.models import Params, SchedulerState, SlotObservation
from policies.allocator import AllocatorPolicy, actual_purchase, decide_purchase, step


@pytest.fixture
def threshold_params() -> Params:
    return Params(V=10.0, epsilon=0.0, x_max=400.0, a_max=175.0, s_max=90.0, gamma_max=180.0)


class TestDecidePurchase:

    def test_below_threshold_buys_nothing(self, threshold_params):
        assert decide_purchase(SchedulerState(Q=100, Z=60), 20.0, threshold_params) == 0.0

    def test_above_threshold_buys_cap(self, threshold_params):
        assert decide_purchase(SchedulerState(Q=150, Z=60), 20.0, threshold_params) == 400.0

    def test_tie_buys_nothing(self, threshold_params):
        assert decide_purchase(SchedulerState(Q=140, Z=60), 20.0, threshold_params) == 0.0

    def test_always_bang_bang(self, threshold_params):
        rng = np.random.default_rng(3)
        for Q, Z, gamma in rng.uniform(0, 2000, size=(500, 3)):
            x = decide_purchase(SchedulerState(Q=Q, Z=Z), gamma, threshold_params)
            assert x in (0.0, threshold_params.x_max)


class TestActualPurchase:

    @pytest.mark.parametrize("Q, s, x, expected", [
        (50, 5, 20, 20),
        (10, 4, 20, 6),
        (3, 5, 2, 0),
    ])
    def test_examples(self, Q, s, x, expected):
        assert actual_purchase(Q, s, x) == expected

    def test_served_identity_on_small_grid(self):
        grid = [0.0, 1.0, 2.0, 3.0, 5.0]
        for Q, s, x in itertools.product(grid, repeat=3):
            x_actual = actual_purchase(Q, s, x)
            assert 0.0 <= x_actual <= x
            assert min(Q, s + x) == min(Q, s + x_actual)
            # every purchased unit is actually served
            assert min(Q, s + x) == pytest.approx(min(Q, s) + x_actual)


class TestAllocatorStep:

    def test_starts_empty(self, experiment_params):
        policy = AllocatorPolicy(params=experiment_params)
        assert policy.state == SchedulerState(Q=0.0, Z=0.0)

    def test_rejects_invalid_params(self, experiment_params):
        with pytest.raises(ParamsValidationError):
            AllocatorPolicy(params=Params(V=100, epsilon=87.5, x_max=100, a_max=175, s_max=90, gamma_max=180))

    def test_empty_system(self, experiment_params):
        policy = AllocatorPolicy(params=experiment_params)
        outcome = policy.step(SlotObservation(s=30.0, a=42.0, gamma=5.0))
        assert outcome.x == 0.0
        assert outcome.x_actual == 0.0
        assert outcome.cost == 0.0
        assert outcome.served == 0.0
        assert policy.state.Q == 42.0
        assert policy.state.Z == 0.0  # indicator reads Q before the update

    def test_large_backlog_buys(self, experiment_params):
        policy = AllocatorPolicy(params=experiment_params, state=SchedulerState(Q=18000.0, Z=100.0))
        policy, outcome = step(policy, SlotObservation(s=0.0, a=0.0, gamma=1.0))
        assert outcome.x == 400.0
        assert outcome.x_actual == 400.0
        assert outcome.served == 400.0
        assert outcome.cost == 400.0
        assert policy.state.Q == 17600.0
        assert policy.state.Z == 0.0

    def test_cost_columns(self, experiment_params):
        policy = AllocatorPolicy(params=experiment_params, state=SchedulerState(Q=250.0, Z=0.0))
        outcome = policy.step(SlotObservation(s=50.0, a=0.0, gamma=2.0))
        # buys x_max but only the 200-unit shortfall is needed
        assert outcome.x == 400.0
        assert outcome.x_actual == 200.0
        assert outcome.cost_x == 800.0
        assert outcome.cost == 400.0
        assert outcome.served == 250.0

    def test_queue_advances_with_decision_not_actual_purchase(self, experiment_params):
        policy = AllocatorPolicy(params=experiment_params, state=SchedulerState(Q=250.0, Z=300.0))
        policy.step(SlotObservation(s=50.0, a=10.0, gamma=2.0))
        assert policy.state.Q == 10.0
        assert policy.state.Z == max(300.0 - 50.0 - 400.0 + 87.5, 0.0)

    def test_slot_counter(self, experiment_params):
        policy = AllocatorPolicy(params=experiment_params)
        slots = [policy.step(SlotObservation(s=1.0, a=1.0, gamma=1.0)).slot for _ in range(3)]
        assert slots == [0, 1, 2]

    def test_replay_determinism(self, experiment_params):
        rng = np.random.default_rng(5)
        observations = [
            SlotObservation(s=float(s), a=float(a), gamma=float(g))
            for s, a, g in zip(rng.uniform(0, 90, 300), rng.integers(0, 176, 300), rng.uniform(0, 180, 300))
        ]
        first = AllocatorPolicy(params=experiment_params)
        second = AllocatorPolicy(params=experiment_params)
        assert [first.step(o) for o in observations] == [second.step(o) for o in observations]
