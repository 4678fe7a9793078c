#!/usr/bin/env python3
"""
Demand models, price optimisation, demand realisation and the joint policy.
"""

import numpy as np
import pytest

from core.models import Params, SchedulerState, SlotObservation
from core.queue_dynamics import derived_bounds
from policies.pricing import (
    LinearDemand,
    PricingDecision,
    PricingPolicy,
    RealizationMode,
    constant_demand,
    optimize_price,
    price_grid,
    pricing_step,
    profit,
    realize_demand,
    scaled_exponential_demand,
    scaled_linear_demand,
)


@pytest.fixture
def unit_params() -> Params:
    return Params(V=10.0, epsilon=0.0, x_max=1.0, a_max=1.0, s_max=0.0, gamma_max=0.0, p_max=10.0)


class TestDemandModels:

    def test_linear_shape(self):
        demand = LinearDemand(a_max=4.0, p_max=10.0)
        values = demand.evaluate(np.array([0.0, 5.0, 10.0]), 1.0, 0.0)
        assert list(values) == [4.0, 2.0, 0.0]

    def test_linear_capped_at_a_max(self):
        demand = LinearDemand(a_max=4.0, p_max=10.0)
        assert demand.expected(0.0, 3.0, 0.0) == 4.0

    def test_linear_needs_positive_p_max(self):
        with pytest.raises(ValueError):
            LinearDemand(a_max=4.0, p_max=0.0)

    def test_missing_demand_state_means_one(self):
        demand = LinearDemand(a_max=4.0, p_max=10.0)
        assert demand.expected(5.0, None, 0.0) == demand.expected(5.0, 1.0, 0.0)

    def test_scaled_policy_curve_ignores_y(self):
        demand = scaled_linear_demand(a_max=175.0, p_max=200.0)
        prices = np.linspace(0, 200, 11)
        assert np.array_equal(demand.policy_curve(prices, 0.5, 0.0), demand.policy_curve(prices, 7.0, 0.0))
        assert demand.expected(50.0, 0.5, 0.0) == pytest.approx(0.5 * demand.expected(50.0, 1.0, 0.0))

    def test_price_grid_includes_p_max(self):
        grid = price_grid(1.0, 0.3)
        assert grid[0] == 0.0
        assert grid[-1] == 1.0
        assert np.all(np.diff(grid) > 0)


class TestOptimizePrice:

    def test_linear_vertex(self, unit_params):
        obs = SlotObservation(s=0.0, a=0.0, gamma=0.0, y=1.0)
        decision = optimize_price(20.0, obs, unit_params, LinearDemand(1.0, 10.0), grid_step=1e-3)
        assert decision.b == 1
        assert decision.p == pytest.approx(6.0, abs=1e-3)
        assert decision.objective == pytest.approx(16.0, abs=1e-5)

    def test_negative_objective_rejects(self):
        params = Params(V=1.0, epsilon=0.0, x_max=1.0, a_max=1.0, s_max=0.0, gamma_max=0.0, p_max=10.0)
        obs = SlotObservation(s=0.0, a=0.0, gamma=0.0, y=1.0)
        decision = optimize_price(20.0, obs, params, constant_demand(1.0, 1.0), grid_step=1e-3)
        assert decision.b == 0
        assert decision.p == 10.0
        assert decision.objective == pytest.approx(-10.0)

    def test_empty_queue_accepts(self, experiment_params):
        obs = SlotObservation(s=0.0, a=0.0, gamma=10.0)
        for demand in (LinearDemand(175.0, 200.0), scaled_exponential_demand(175.0, 200.0)):
            assert optimize_price(0.0, obs, experiment_params, demand).b == 1

    def test_ties_resolve_to_largest_price(self, unit_params):
        # with y = 0 the objective is 0 at every price
        demand = LinearDemand(1.0, 10.0)
        obs = SlotObservation(s=0.0, a=0.0, gamma=0.0, y=0.0)
        decision = optimize_price(3.0, obs, unit_params, demand, grid_step=0.5)
        assert decision.objective == 0.0
        assert decision.p == 10.0
        assert decision.b == 1

    @pytest.mark.parametrize("Q", [0.0, 1000.0, 5000.0, 9000.0])
    def test_matches_closed_form(self, experiment_params, Q):
        demand = LinearDemand(experiment_params.a_max, experiment_params.p_max)
        obs = SlotObservation(s=0.0, a=0.0, gamma=0.0, y=1.0)
        decision = optimize_price(Q, obs, experiment_params, demand)
        step = experiment_params.p_max / 10_000
        assert decision.p == pytest.approx(demand.closed_form_price(Q, experiment_params.V), abs=step)

    @pytest.mark.parametrize("Q", [0.0, 50.0, 3000.0])
    def test_scaled_price_invariant_to_demand_state(self, experiment_params, Q):
        demand = scaled_linear_demand(experiment_params.a_max, experiment_params.p_max)
        prices = {
            optimize_price(Q, SlotObservation(s=0.0, a=0.0, gamma=5.0, y=y), experiment_params, demand).p
            for y in (0.5, 1.0, 7.0)
        }
        assert len(prices) == 1


class TestRealizeDemand:

    def test_rejected_slot_has_no_arrivals(self):
        rng = np.random.default_rng(0)
        decision = PricingDecision(b=0, p=3.0, objective=-1.0)
        obs = SlotObservation(s=0.0, a=0.0, gamma=0.0)
        assert realize_demand(decision, obs, constant_demand(10.0, 3.5), rng) == 0.0

    def test_deterministic_mode_returns_mean(self):
        rng = np.random.default_rng(0)
        decision = PricingDecision(b=1, p=0.0, objective=0.0)
        obs = SlotObservation(s=0.0, a=0.0, gamma=0.0)
        assert realize_demand(decision, obs, constant_demand(10.0, 3.5), rng) == 3.5

    def _noise_mean(self, draws: int) -> float:
        rng = np.random.default_rng(2024)
        decision = PricingDecision(b=1, p=0.0, objective=0.0)
        obs = SlotObservation(s=0.0, a=0.0, gamma=0.0)
        demand = constant_demand(175.0, 87.5)
        samples = np.array([
            realize_demand(decision, obs, demand, rng, RealizationMode.UNIFORM_NOISE) for _ in range(draws)
        ])
        assert samples.min() >= 0.0
        assert samples.max() <= 175.0
        return float(samples.mean())

    def test_uniform_noise_mean(self):
        assert abs(self._noise_mean(100_000) - 87.5) <= 1.0

    @pytest.mark.slow
    def test_uniform_noise_mean_full(self):
        assert abs(self._noise_mean(1_000_000) - 87.5) <= 0.5

    def test_uniform_noise_respects_bounds_near_cap(self):
        rng = np.random.default_rng(1)
        decision = PricingDecision(b=1, p=0.0, objective=0.0)
        obs = SlotObservation(s=0.0, a=0.0, gamma=0.0)
        demand = constant_demand(10.0, 9.0)
        for _ in range(1000):
            value = realize_demand(decision, obs, demand, rng, RealizationMode.UNIFORM_NOISE)
            assert 8.0 <= value <= 10.0


class TestProfit:

    @pytest.mark.parametrize("b, p, a, gamma, x, expected", [
        (1, 6.0, 0.4, 2.0, 0.0, 2.4),
        (0, 3.0, 0.0, 5.0, 1.0, -5.0),
        (1, 0.0, 3.0, 0.0, 0.0, 0.0),
    ])
    def test_examples(self, b, p, a, gamma, x, expected):
        assert profit(b, p, a, gamma, x) == pytest.approx(expected)


class TestPricingPolicy:

    def _policy(self, params, mode=RealizationMode.DETERMINISTIC, seed=0):
        return PricingPolicy(
            params=params,
            demand=LinearDemand(params.a_max, params.p_max),
            rng=np.random.default_rng(seed),
            mode=mode,
        )

    def test_empty_system(self, experiment_params):
        policy = self._policy(experiment_params)
        policy, outcome = pricing_step(policy, SlotObservation(s=10.0, a=0.0, gamma=50.0, y=1.0))
        assert outcome.b == 1
        assert outcome.x == 0.0
        assert policy.state.Q == outcome.a
        assert outcome.a > 0

    def test_profit_dominance_and_rejections(self, experiment_params):
        policy = self._policy(experiment_params, RealizationMode.UNIFORM_NOISE, seed=9)
        rng = np.random.default_rng(9)
        for s, gamma in zip(rng.uniform(0, 90, 3000), rng.uniform(0, 180, 3000)):
            before = policy.state
            outcome = policy.step(SlotObservation(s=float(s), a=0.0, gamma=float(gamma), y=1.0))
            assert outcome.profit_actual >= outcome.profit - 1e-9
            if outcome.b == 0:
                assert outcome.a == 0.0
                assert policy.state.Q <= before.Q

    def test_backlog_bounds_hold(self, experiment_params):
        bounds = derived_bounds(experiment_params)
        policy = self._policy(experiment_params, RealizationMode.UNIFORM_NOISE, seed=4)
        rng = np.random.default_rng(4)
        for s, gamma in zip(rng.uniform(0, 90, 5000), rng.uniform(0, 180, 5000)):
            policy.step(SlotObservation(s=float(s), a=0.0, gamma=float(gamma), y=1.0))
            assert policy.state.Q <= bounds.Q_max
            assert policy.state.Z <= bounds.Z_max

    def test_seeded_determinism(self, experiment_params):
        observations = [SlotObservation(s=5.0, a=0.0, gamma=20.0, y=1.0)] * 200
        first = self._policy(experiment_params, RealizationMode.UNIFORM_NOISE, seed=3)
        second = self._policy(experiment_params, RealizationMode.UNIFORM_NOISE, seed=3)
        assert [first.step(o) for o in observations] == [second.step(o) for o in observations]

    def test_initial_state(self, experiment_params):
        assert self._policy(experiment_params).state == SchedulerState()
