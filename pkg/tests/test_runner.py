#!/usr/bin/env python3
"""
Simulation runner and end-to-end guarantees on synthetic traces.
"""

from dataclasses import replace

import numpy as np
import pytest

from analysis.verification import verify
from core.errors import ParamsValidationError, TraceBoundsError
from core.models import UNBOUNDED, Params
from harness.runner import PolicyKind, RunOptions, run_policy
from harness.sweeps import compare
from policies.pricing import LinearDemand, RealizationMode
from analysis.oracle import stationary_profit_oracle
from traces import GeneratorKind, generate
from conftest import make_trace, experiment_spec

OPTIONS = RunOptions(collect_metrics=False)
FAMILIES = [GeneratorKind.IID_UNIFORM, GeneratorKind.MARKOV, GeneratorKind.PRICE_SPIKE]


@pytest.fixture(scope="module")
def short_trace():
    return generate(experiment_spec(GeneratorKind.IID_UNIFORM, 3), 500)


class TestRunPolicy:

    @pytest.mark.parametrize("policy", list(PolicyKind))
    def test_record_lengths(self, short_trace, experiment_params, policy):
        run = run_policy(short_trace, policy, experiment_params, OPTIONS)
        assert len(run) == len(short_trace)
        assert len(run.q_trajectory) == len(short_trace)
        assert len(run.z_trajectory) == len(short_trace)
        assert len(run.cumulative_cost) == len(short_trace)
        assert np.all(np.diff(run.cumulative_cost) >= 0)

    @pytest.mark.parametrize("policy", list(PolicyKind))
    def test_deterministic_given_seed(self, short_trace, experiment_params, policy):
        options = replace(OPTIONS, seed=5, realization=RealizationMode.UNIFORM_NOISE)
        first = run_policy(short_trace, policy, experiment_params, options)
        second = run_policy(short_trace, policy, experiment_params, options)
        assert first.outcomes == second.outcomes
        assert first.q_trajectory == second.q_trajectory

    def test_drift_checked_by_default(self, short_trace, experiment_params):
        run = run_policy(short_trace, PolicyKind.LYAPUNOV, experiment_params, OPTIONS)
        assert run.drift_checked
        assert run.drift_violations == []
        assert run.consistency_violations == []

    def test_drift_check_can_be_disabled(self, short_trace, experiment_params):
        run = run_policy(short_trace, PolicyKind.LYAPUNOV, experiment_params, replace(OPTIONS, check_drift=False))
        assert not run.drift_checked

    def test_greedy_deadline_defaults_to_delay_bound(self, short_trace, experiment_params):
        run = run_policy(short_trace, PolicyKind.GREEDY, experiment_params, OPTIONS)
        assert run.greedy_deadline == 415
        assert run.z_trajectory == [0.0] * len(short_trace)
        assert run.summary()["deadline"] == 415

    def test_greedy_needs_deadline_when_epsilon_zero(self, short_trace, experiment_params):
        params = replace(experiment_params, epsilon=0.0)
        with pytest.raises(ParamsValidationError):
            run_policy(short_trace, PolicyKind.GREEDY, params, OPTIONS)
        run = run_policy(short_trace, PolicyKind.GREEDY, params, replace(OPTIONS, greedy_deadline=20))
        assert run.delay_stats.max_delay <= 20

    def test_trace_outside_bounds(self, experiment_params):
        trace = make_trace(s=[0.0], a=[500.0], gamma=[1.0])
        with pytest.raises(TraceBoundsError):
            run_policy(trace, PolicyKind.LYAPUNOV, experiment_params, OPTIONS)

    def test_pricing_ignores_trace_demand_column(self, experiment_params):
        trace = make_trace(s=[0.0], a=[500.0], gamma=[1.0])
        run = run_policy(trace, PolicyKind.PRICING, experiment_params, OPTIONS)
        assert run.outcomes[0].a <= experiment_params.a_max
        assert run.demand_name is not None

    def test_invalid_params(self, short_trace, experiment_params):
        with pytest.raises(ParamsValidationError):
            run_policy(short_trace, PolicyKind.LYAPUNOV, replace(experiment_params, x_max=10.0), OPTIONS)

    def test_summary_fields(self, short_trace, experiment_params):
        run = run_policy(short_trace, PolicyKind.LYAPUNOV, experiment_params, OPTIONS)
        summary = run.summary()
        assert summary["policy"] == "lyapunov"
        assert summary["slots"] == 500
        assert summary["D_max"] == "415"
        assert summary["Q_max"] == 18175.0
        assert "average_profit" not in summary
        assert run.profit_curve is None

    def test_pricing_summary(self, short_trace, experiment_params):
        run = run_policy(short_trace, PolicyKind.PRICING, experiment_params, OPTIONS)
        summary = run.summary()
        assert summary["realization"] == "deterministic"
        assert run.profit_curve[-1] == pytest.approx(run.average_profit() * len(run))
        assert summary["average_profit_actual"] == pytest.approx(run.average_profit(actual=True), abs=1e-6)
        assert run.average_profit(actual=True) >= run.average_profit() - 1e-9

    def test_metrics_collected(self, short_trace, experiment_params):
        run = run_policy(short_trace, PolicyKind.LYAPUNOV, experiment_params)
        assert run.metrics is not None
        assert run.metrics.slots == 500
        assert run_policy(short_trace, PolicyKind.LYAPUNOV, experiment_params, OPTIONS).metrics is None

    def test_empty_trace(self, experiment_params):
        run = run_policy(make_trace([], [], []), PolicyKind.LYAPUNOV, experiment_params, OPTIONS)
        assert len(run) == 0
        assert run.max_Q == 0.0
        assert run.total_cost == 0.0


def _check_guarantees(kind: GeneratorKind, seed: int, slots: int, params: Params):
    trace = generate(experiment_spec(kind, seed), slots)
    run = run_policy(trace, PolicyKind.LYAPUNOV, params, OPTIONS)
    assert run.drift_violations == []
    report = verify(run)
    assert report.passed, (kind, seed, [c.to_dict() for c in report.failures])


class TestGuaranteesOnSyntheticTraces:
    """Backlog, delay, drift and frame-oracle bounds on every trace family"""

    @pytest.mark.parametrize("kind", FAMILIES)
    def test_reduced_suite(self, kind, experiment_params):
        _check_guarantees(kind, seed=0, slots=20_000, params=experiment_params)

    @pytest.mark.slow
    @pytest.mark.parametrize("kind", FAMILIES)
    @pytest.mark.parametrize("seed", range(34))
    def test_full_suite(self, kind, seed, experiment_params):
        _check_guarantees(kind, seed=seed, slots=100_000, params=experiment_params)


class TestOptimalityGap:

    @pytest.fixture
    def constant_price_params(self) -> Params:
        return Params(V=50.0, epsilon=2.0, x_max=4.0, a_max=4.0, s_max=0.0, gamma_max=2.0)

    def _average_cost(self, slots: int, params: Params) -> float:
        rng = np.random.default_rng(101)
        a = rng.integers(0, 5, slots).astype(float)
        trace = make_trace(s=[0.0] * slots, a=a.tolist(), gamma=[2.0] * slots)
        run = run_policy(trace, PolicyKind.LYAPUNOV, params, replace(OPTIONS, check_drift=False))
        return run.total_cost_x / slots

    def test_average_cost_within_gap(self, constant_price_params):
        # c* = 2 * E[a] = 4 and B / V = 24 / 50
        average = self._average_cost(100_000, constant_price_params)
        assert 3.95 <= average <= 4.53

    @pytest.mark.slow
    def test_average_cost_within_gap_full(self, constant_price_params):
        average = self._average_cost(1_000_000, constant_price_params)
        assert 3.95 <= average <= 4.53


class TestProfitGap:

    @pytest.fixture
    def constant_params(self) -> Params:
        return Params(V=50.0, epsilon=2.0, x_max=4.0, a_max=4.0, s_max=2.0, gamma_max=1.0, p_max=10.0)

    def _average_profit(self, slots: int, params: Params) -> float:
        trace = make_trace(s=[2.0] * slots, a=[0.0] * slots, gamma=[1.0] * slots, y=[1.0] * slots)
        run = run_policy(trace, PolicyKind.PRICING, params, replace(OPTIONS, check_drift=False))
        return run.average_profit()

    def _threshold(self, params: Params) -> float:
        optimum = stationary_profit_oracle(2.0, 1.0, 1.0, LinearDemand(4.0, 10.0), params)
        assert optimum.phi_star == pytest.approx(10.0, abs=1e-6)
        # B = 44, so B / V = 0.88
        return optimum.phi_star - 44.0 / params.V - 0.05

    def test_average_profit_within_gap(self, constant_params):
        assert self._average_profit(20_000, constant_params) >= self._threshold(constant_params)

    @pytest.mark.slow
    def test_average_profit_within_gap_full(self, constant_params):
        assert self._average_profit(1_000_000, constant_params) >= self._threshold(constant_params)


class TestGreedyComparison:

    def _costs(self, seeds, slots, params):
        lyapunov, greedy = 0.0, 0.0
        for seed in seeds:
            result = compare(generate(experiment_spec(GeneratorKind.PRICE_SPIKE, seed), slots), params, OPTIONS)
            assert result.deadline == 415
            lyapunov += result.lyapunov.total_cost
            greedy += result.greedy.total_cost
        return lyapunov, greedy

    def test_lyapunov_cheaper_on_price_spikes(self, experiment_params):
        lyapunov, greedy = self._costs(range(5), 5000, experiment_params)
        assert lyapunov <= 0.8 * greedy

    @pytest.mark.slow
    def test_lyapunov_cheaper_on_price_spikes_full(self, experiment_params):
        lyapunov, greedy = self._costs(range(5), 26_496, experiment_params)
        assert lyapunov <= 0.8 * greedy


class TestZeroEpsilon:

    @pytest.mark.parametrize("kind", FAMILIES)
    def test_runs_without_delay_bound(self, kind, experiment_params):
        trace = generate(experiment_spec(kind, 2), 20_000)
        zero = run_policy(trace, PolicyKind.LYAPUNOV, replace(experiment_params, epsilon=0.0), OPTIONS)
        assert zero.bounds.D_max is UNBOUNDED
        assert zero.summary()["D_max"] == "unbounded"
        assert zero.max_Q <= zero.bounds.Q_max
        assert zero.delay_stats.count > 0
        assert np.isfinite(zero.delay_stats.max_delay)

        standard = run_policy(trace, PolicyKind.LYAPUNOV, experiment_params, OPTIONS)
        assert zero.total_cost <= standard.total_cost
