#!/usr/bin/env python3
"""
runner.py

Purpose:
  Drives one policy over one trace. The FIFO tracker is attached to
  every run, the one-slot drift checker is enabled unless switched off,
  and the complete per-slot record is kept for verification and CSV
  export.

Version: 1.0.0
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from analysis.fifo_tracker import DelayStats, FifoTracker
from core.errors import ParamsValidationError
from core.models import DerivedBounds, Params, SlotOutcome
from core.queue_dynamics import check_drift_inequality, derived_bounds, validate_params
from policies.allocator import AllocatorPolicy
from policies.greedy import GreedyPolicy
from policies.pricing import DemandModel, LinearDemand, PricingPolicy, RealizationMode
from traces.models import Trace
from traces.trace_io import check_bounds
from utils.performance_metrics import MetricsCollector, RunMetrics

logger = logging.getLogger(__name__)

# Allowed relative gap between tracker backlog and Q (floating-point drift only)
CONSISTENCY_TOLERANCE = 1e-6


class PolicyKind(Enum):
    LYAPUNOV = "lyapunov"
    GREEDY = "greedy"
    PRICING = "pricing"


@dataclass
class RunOptions:
    """Per-run knobs that are not part of the algorithm parameters"""
    seed: int = 0
    check_drift: bool = True
    demand: Optional[DemandModel] = None  # pricing; defaults to LINEAR(a_max, p_max)
    realization: RealizationMode = RealizationMode.DETERMINISTIC
    grid_step: Optional[float] = None
    greedy_deadline: Optional[int] = None  # defaults to D_max
    collect_metrics: bool = True


@dataclass
class RunRecord:
    """Everything a finished simulation produced.

    ``q_trajectory[t]``/``z_trajectory[t]`` hold the state after slot t;
    the state before slot 0 is (0, 0). For the greedy baseline Q is the
    pending FIFO backlog and Z is identically zero.
    """
    policy: PolicyKind
    params: Params
    trace: Trace
    outcomes: List[SlotOutcome]
    q_trajectory: List[float]
    z_trajectory: List[float]
    delay_stats: DelayStats
    pending_total: float
    served_total: float = 0.0  # everything the tracker drained, finished batches or not
    seed: int = 0
    realization_mode: Optional[RealizationMode] = None
    demand_name: Optional[str] = None
    drift_checked: bool = False
    drift_violations: List[int] = field(default_factory=list)
    consistency_violations: List[int] = field(default_factory=list)
    greedy_deadline: Optional[int] = None
    supply_served_total: float = 0.0
    purchased_total: float = 0.0
    x_max_excess_slots: int = 0
    metrics: Optional[RunMetrics] = None

    def __len__(self) -> int:
        return len(self.outcomes)

    @property
    def bounds(self) -> DerivedBounds:
        return derived_bounds(self.params)

    def _column(self, name: str) -> np.ndarray:
        return np.array([getattr(o, name) for o in self.outcomes], dtype=float)

    @property
    def cumulative_cost(self) -> np.ndarray:
        """Running total of gamma * actual purchase."""
        return np.cumsum(self._column("cost"))

    @property
    def cumulative_cost_x(self) -> np.ndarray:
        """Running total of gamma * decision x."""
        return np.cumsum(self._column("cost_x"))

    @property
    def profit_curve(self) -> Optional[np.ndarray]:
        if self.policy is not PolicyKind.PRICING:
            return None
        return np.cumsum(self._column("profit"))

    @property
    def total_cost(self) -> float:
        return float(self._column("cost").sum())

    @property
    def total_cost_x(self) -> float:
        return float(self._column("cost_x").sum())

    @property
    def max_Q(self) -> float:
        return max(self.q_trajectory, default=0.0)

    @property
    def max_Z(self) -> float:
        return max(self.z_trajectory, default=0.0)

    def average_profit(self, actual: bool = False) -> float:
        if self.policy is not PolicyKind.PRICING or not self.outcomes:
            return 0.0
        return float(self._column("profit_actual" if actual else "profit").mean())

    def deadline_fraction(self) -> Optional[float]:
        """Share of greedy batches that were completed exactly at the deadline."""
        if self.greedy_deadline is None or self.delay_stats.count == 0:
            return None
        at_deadline = self.delay_stats.histogram.get(self.greedy_deadline, 0)
        return at_deadline / self.delay_stats.count

    def summary(self) -> Dict[str, Any]:
        bounds = self.bounds
        data = {
            "policy": self.policy.value,
            "slots": len(self),
            "seed": self.seed,
            "total_cost": round(self.total_cost, 6),
            "total_cost_x": round(self.total_cost_x, 6),
            "max_Q": self.max_Q,
            "max_Z": self.max_Z,
            "Q_max": bounds.Q_max,
            "Z_max": bounds.Z_max,
            "D_max": str(bounds.D_max),
            "drift_violations": len(self.drift_violations),
            **self.delay_stats.summary(),
        }
        if self.policy is PolicyKind.PRICING:
            data["realization"] = self.realization_mode.value
            data["demand"] = self.demand_name
            data["average_profit"] = round(self.average_profit(), 6)
            data["average_profit_actual"] = round(self.average_profit(actual=True), 6)
        if self.policy is PolicyKind.GREEDY:
            data["deadline"] = self.greedy_deadline
            data["deadline_fraction"] = self.deadline_fraction()
            data["x_max_excess_slots"] = self.x_max_excess_slots
        return data


def _check_trace(trace: Trace, p: Params, policy: PolicyKind):
    # pricing realises its own arrivals, so the trace's a column is not used
    a_max = None if policy is PolicyKind.PRICING else p.a_max
    for obs in trace.slots:
        check_bounds(obs, p.s_max, a_max, p.gamma_max, line_number=None)


def _greedy_deadline(p: Params, options: RunOptions) -> int:
    if options.greedy_deadline is not None:
        return options.greedy_deadline
    bounds = derived_bounds(p)
    if not bounds.delay_bounded:
        raise ParamsValidationError(
            "greedy deadline defaults to D_max, which is unbounded for epsilon = 0; "
            "set the deadline explicitly",
            rule="epsilon > 0",
        )
    return bounds.D_max


def _consistent(tracker: FifoTracker, Q: float) -> bool:
    return abs(tracker.total_remaining - Q) <= CONSISTENCY_TOLERANCE * max(1.0, Q)


def run_policy(trace: Trace, policy: PolicyKind, p: Params,
               options: Optional[RunOptions] = None) -> RunRecord:
    """Simulate ``policy`` on ``trace`` and return the full run record.

    Deterministic given (trace, params, options.seed).

    Raises:
        ParamsValidationError: invalid parameters (or ε = 0 greedy without a deadline)
        TraceBoundsError: an observation outside the declared bounds
    """
    options = options or RunOptions()
    validate_params(p)
    _check_trace(trace, p, policy)

    logger.info(
        f"🚀 Running {policy.value} over {len(trace)} slots "
        f"(V={p.V:g}, epsilon={p.epsilon:g}, seed={options.seed})"
    )
    collector = MetricsCollector() if options.collect_metrics else None
    if collector:
        collector.start_monitoring()

    if policy is PolicyKind.GREEDY:
        record = _run_greedy(trace, p, options, collector)
    else:
        record = _run_queue_policy(trace, policy, p, options, collector)

    if collector:
        record.metrics = collector.get_metrics()
    logger.info(
        f"✅ {policy.value} finished: cost={record.total_cost:.6g}, "
        f"max_Q={record.max_Q:g}, max_delay={record.delay_stats.max_delay}"
    )
    return record


def _run_queue_policy(trace: Trace, kind: PolicyKind, p: Params, options: RunOptions,
                      collector: Optional[MetricsCollector]) -> RunRecord:
    if kind is PolicyKind.PRICING:
        demand = options.demand or LinearDemand(p.a_max, p.p_max)
        policy = PricingPolicy(
            params=p,
            demand=demand,
            rng=np.random.default_rng(options.seed),
            mode=options.realization,
            grid_step=options.grid_step,
        )
    else:
        demand = None
        policy = AllocatorPolicy(params=p)

    tracker = FifoTracker()
    outcomes: List[SlotOutcome] = []
    q_trajectory: List[float] = []
    z_trajectory: List[float] = []
    drift_violations: List[int] = []
    consistency_violations: List[int] = []

    for slot, obs in enumerate(trace.slots):
        before = policy.state
        outcome = policy.step(obs)
        after = policy.state

        tracker.apply_service(slot, outcome.served)
        tracker.enqueue(slot, outcome.a)
        if not _consistent(tracker, after.Q):
            consistency_violations.append(slot)

        if options.check_drift and not check_drift_inequality(before, after, obs, outcome.x, p, a=outcome.a):
            drift_violations.append(slot)

        outcomes.append(outcome)
        q_trajectory.append(after.Q)
        z_trajectory.append(after.Z)
        if collector:
            collector.record_slot()

    if drift_violations:
        logger.error(f"❌ Drift inequality failed on {len(drift_violations)} slots")
    if consistency_violations:
        logger.error(f"❌ Tracker and queue disagree on {len(consistency_violations)} slots")

    return RunRecord(
        policy=kind,
        params=p,
        trace=trace,
        outcomes=outcomes,
        q_trajectory=q_trajectory,
        z_trajectory=z_trajectory,
        delay_stats=tracker.stats,
        pending_total=tracker.total_remaining,
        served_total=tracker.served_total,
        seed=options.seed,
        realization_mode=options.realization if kind is PolicyKind.PRICING else None,
        demand_name=demand.name if demand else None,
        drift_checked=options.check_drift,
        drift_violations=drift_violations,
        consistency_violations=consistency_violations,
    )


def _run_greedy(trace: Trace, p: Params, options: RunOptions,
                collector: Optional[MetricsCollector]) -> RunRecord:
    policy = GreedyPolicy(deadline=_greedy_deadline(p, options))
    outcomes: List[SlotOutcome] = []
    backlog: List[float] = []

    for obs in trace.slots:
        outcomes.append(policy.step(obs, p))
        backlog.append(policy.tracker.total_remaining)
        if collector:
            collector.record_slot()

    return RunRecord(
        policy=PolicyKind.GREEDY,
        params=p,
        trace=trace,
        outcomes=outcomes,
        q_trajectory=backlog,
        z_trajectory=[0.0] * len(outcomes),
        delay_stats=policy.tracker.stats,
        pending_total=policy.tracker.total_remaining,
        served_total=policy.tracker.served_total,
        seed=options.seed,
        greedy_deadline=policy.deadline,
        supply_served_total=policy.supply_served_total,
        purchased_total=policy.purchased_total,
        x_max_excess_slots=policy.x_max_excess_slots,
    )
