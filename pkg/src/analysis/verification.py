#!/usr/bin/env python3
"""
verification.py

Purpose:
  Post-run checkers for the guarantees of the allocation and pricing
  policies, and the conservation/deadline properties of the greedy
  baseline. Checkers never raise: every finding becomes a report entry.

Version: 1.0.0
"""

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from analysis.fifo_tracker import verify_delay_bound
from analysis.oracle import check_universal_bound
from core.models import UNBOUNDED, DelayBound, DerivedBounds, Params, SchedulerState
from core.queue_dynamics import DRIFT_SLACK, check_drift_inequality, derived_bounds
from traces.models import Trace

if TYPE_CHECKING:
    from harness.runner import RunRecord

logger = logging.getLogger(__name__)

DEFAULT_FRAME_SIZES = (1, 10, 100)


@dataclass
class VerificationCheck:
    """One pass/fail entry with the measured extreme and the bound it is held to.

    ``advisory`` entries are reported but never fail a verification.
    """
    name: str
    passed: bool
    measured: Optional[float] = None
    bound: Optional[float] = None
    detail: str = ""
    applicable: bool = True
    advisory: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "check": self.name,
            "status": self.status,
            "measured": self.measured,
            "bound": self.bound,
            "detail": self.detail,
        }

    @property
    def status(self) -> str:
        if not self.applicable:
            return "skipped"
        if self.passed:
            return "pass"
        return "warn" if self.advisory else "fail"


@dataclass
class VerificationReport:
    policy: str
    checks: List[VerificationCheck] = field(default_factory=list)

    def add(self, check: VerificationCheck) -> VerificationCheck:
        self.checks.append(check)
        return check

    @property
    def failures(self) -> List[VerificationCheck]:
        return [c for c in self.checks if c.applicable and not c.advisory and not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def get(self, name: str) -> Optional[VerificationCheck]:
        return next((c for c in self.checks if c.name == name), None)

    def to_rows(self) -> List[Dict[str, Any]]:
        return [c.to_dict() for c in self.checks]


# -- supplementary checks ----------------------------------------------------

def supply_delay_bound(supply: Sequence[float], start: int, q_max: float) -> DelayBound:
    """Worst-case delay of a request arriving at ``start`` when epsilon = 0.

    The smallest T > 0 with s(start+1) + ... + s(start+T) >= q_max, or
    UNBOUNDED when the trace ends first.
    """
    bounds = supply_delay_bounds(supply, [start], q_max)
    return bounds[0]


def supply_delay_bounds(supply: Sequence[float], starts: Iterable[int], q_max: float) -> List[DelayBound]:
    """Vectorised ``supply_delay_bound`` over many arrival slots."""
    s = np.asarray(supply, dtype=float)
    n = len(s)
    prefix = np.concatenate(([0.0], np.cumsum(s)))
    starts = np.asarray(list(starts), dtype=int)
    if starts.size == 0:
        return []
    targets = prefix[np.minimum(starts + 1, n)] + q_max
    # prefix[k] >= target with k = start + T + 1
    k = np.searchsorted(prefix, targets, side="left")
    result: List[DelayBound] = []
    for start, index in zip(starts, k):
        if index > n:
            result.append(UNBOUNDED)
        else:
            result.append(max(int(index) - int(start) - 1, 1))
    return result


@dataclass(frozen=True)
class CostGapReport:
    """Time-average cost of a run against c* + B/V"""
    average_cost_x: float
    average_cost: float
    c_star: float
    gap: float  # B / V
    rhs: float
    tolerance: float
    passed: bool


def check_cost_gap(run: "RunRecord", c_star: float, bounds: DerivedBounds, V: float,
                   tolerance: float = 0.0) -> CostGapReport:
    """Compare mean gamma * x of a run with c* + B/V (plus a statistical tolerance)."""
    n = len(run.outcomes)
    average_cost_x = run.total_cost_x / n if n else 0.0
    average_cost = run.total_cost / n if n else 0.0
    gap = bounds.B / V
    rhs = c_star + gap
    passed = average_cost_x <= rhs + tolerance + DRIFT_SLACK * max(1.0, abs(rhs))
    if not passed:
        logger.error(f"❌ Average cost {average_cost_x:.6g} exceeds c* + B/V = {rhs:.6g}")
    return CostGapReport(
        average_cost_x=average_cost_x,
        average_cost=average_cost,
        c_star=c_star,
        gap=gap,
        rhs=rhs,
        tolerance=tolerance,
        passed=passed,
    )


@dataclass(frozen=True)
class EpsilonAdmissibility:
    epsilon: float
    mean_a: float
    mean_s: float
    admissible: bool


def epsilon_admissibility(trace: Trace, epsilon: float,
                          arrivals: Optional[Sequence[float]] = None) -> EpsilonAdmissibility:
    """Empirical check of epsilon <= max(mean a, mean s).

    The cost-gap guarantee needs it; the backlog and delay bounds do not.
    ``arrivals`` replaces the trace's a column (pricing runs).
    """
    a = np.asarray(arrivals, dtype=float) if arrivals is not None else trace.a
    mean_a = float(a.mean()) if a.size else 0.0
    s = trace.s
    mean_s = float(s.mean()) if s.size else 0.0
    admissible = epsilon <= max(mean_a, mean_s) + DRIFT_SLACK * max(1.0, epsilon)
    if not admissible:
        logger.warning(
            f"⚠️  epsilon={epsilon:g} exceeds max(mean a, mean s) = {max(mean_a, mean_s):.6g}; "
            f"the cost-gap guarantee does not apply"
        )
    return EpsilonAdmissibility(epsilon=epsilon, mean_a=mean_a, mean_s=mean_s, admissible=admissible)


# -- verify ------------------------------------------------------------------

def _within(value: float, bound: float, relative: bool = True) -> bool:
    if not relative:
        return value <= bound
    return value <= bound + DRIFT_SLACK * max(1.0, abs(bound))


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= DRIFT_SLACK * max(1.0, abs(a), abs(b))


def _skipped(name: str, reason: str) -> VerificationCheck:
    return VerificationCheck(name=name, passed=True, detail=reason, applicable=False)


def verify(run: "RunRecord", p: Optional[Params] = None,
           T_values: Sequence[int] = DEFAULT_FRAME_SIZES,
           c_star: Optional[float] = None, cost_tolerance: float = 0.0) -> VerificationReport:
    """Evaluate every guarantee that applies to the run's policy.

    Args:
        run: finished run record
        p: parameters to check against (defaults to the run's own)
        T_values: frame sizes for the universal bound
        c_star: optimal average cost, enables the cost-gap check
        cost_tolerance: statistical slack added to the cost-gap bound

    Returns:
        VerificationReport with one entry per check
    """
    p = p or run.params
    report = VerificationReport(policy=run.policy.value)
    bounds = derived_bounds(p)

    if run.policy.value == "greedy":
        _verify_greedy(run, p, report)
    else:
        _verify_queue_policy(run, p, bounds, report, T_values)
        if c_star is not None:
            gap = check_cost_gap(run, c_star, bounds, p.V, cost_tolerance)
            report.add(VerificationCheck(
                name="cost_gap",
                passed=gap.passed,
                measured=gap.average_cost_x,
                bound=gap.rhs + gap.tolerance,
                detail=f"c*={c_star:g}, B/V={gap.gap:.6g}",
            ))
        arrivals = [o.a for o in run.outcomes] if run.policy.value == "pricing" else None
        admissibility = epsilon_admissibility(run.trace, p.epsilon, arrivals)
        report.add(VerificationCheck(
            name="epsilon_admissible",
            passed=admissibility.admissible,
            measured=p.epsilon,
            bound=max(admissibility.mean_a, admissibility.mean_s),
            detail="needed only for the cost-gap guarantee",
            advisory=True,
        ))

    _verify_conservation(run, report)

    if report.passed:
        logger.info(f"✅ All {len(report.checks)} checks passed for {run.policy.value} run")
    else:
        names = ", ".join(c.name for c in report.failures)
        logger.error(f"❌ Verification failed: {names}")
    return report


def _verify_queue_policy(run: "RunRecord", p: Params, bounds: DerivedBounds,
                         report: VerificationReport, T_values: Sequence[int]):
    outcomes = run.outcomes
    slots = run.trace.slots
    max_Q = run.max_Q
    max_Z = run.max_Z
    report.add(VerificationCheck("Q_bound", _within(max_Q, bounds.Q_max, relative=False), max_Q, bounds.Q_max))
    report.add(VerificationCheck("Z_bound", _within(max_Z, bounds.Z_max, relative=False), max_Z, bounds.Z_max))
    non_negative = min(run.q_trajectory, default=0.0) >= 0 and min(run.z_trajectory, default=0.0) >= 0
    report.add(VerificationCheck("non_negative", non_negative))

    stats = run.delay_stats
    if bounds.delay_bounded:
        report.add(VerificationCheck(
            "delay_bound", verify_delay_bound(stats, bounds), stats.max_delay, bounds.D_max,
        ))
    else:
        report.add(_supply_delay_check(run, bounds))

    bang_bang = all(o.x == 0.0 or o.x == p.x_max for o in outcomes)
    report.add(VerificationCheck("bang_bang", bang_bang, detail="x in {0, x_max}"))

    dominance = all(0.0 <= o.x_actual <= o.x for o in outcomes)
    report.add(VerificationCheck("purchase_dominance", dominance, detail="0 <= x_actual <= x"))

    drift_failures = 0
    growth_Q = 0.0
    growth_Z = 0.0
    served_failures = 0
    before = SchedulerState()
    for outcome, obs, Q, Z in zip(outcomes, slots, run.q_trajectory, run.z_trajectory):
        after = SchedulerState(Q=Q, Z=Z)
        if not check_drift_inequality(before, after, obs, outcome.x, p, a=outcome.a):
            drift_failures += 1
        growth_Q = max(growth_Q, abs(after.Q - before.Q))
        growth_Z = max(growth_Z, abs(after.Z - before.Z))
        expected = min(before.Q, obs.s + outcome.x)
        if not (_close(outcome.served, expected) and _close(outcome.served, min(before.Q, obs.s + outcome.x_actual))):
            served_failures += 1
        before = after

    report.add(VerificationCheck("drift_inequality", drift_failures == 0, drift_failures, 0,
                                 detail="violating slots"))
    report.add(VerificationCheck("growth_Q", _within(growth_Q, bounds.C_Q), growth_Q, bounds.C_Q))
    report.add(VerificationCheck("growth_Z", _within(growth_Z, bounds.C_Z), growth_Z, bounds.C_Z))
    report.add(VerificationCheck("served_identity", served_failures == 0, served_failures, 0,
                                 detail="served = min(Q, s + x) = min(Q, s + x_actual)"))
    report.add(VerificationCheck("tracker_consistency", not run.consistency_violations,
                                 len(run.consistency_violations), 0,
                                 detail="tracker backlog equals Q after every slot"))

    if run.policy.value == "pricing":
        profit_ok = all(o.profit_actual >= o.profit - DRIFT_SLACK * max(1.0, abs(o.profit)) for o in outcomes)
        report.add(VerificationCheck("profit_dominance", profit_ok, detail="actual profit >= profit"))
        rejected_ok = all(o.a == 0.0 for o in outcomes if o.b == 0)
        report.add(VerificationCheck("rejection_no_arrivals", rejected_ok, detail="b = 0 implies a = 0"))
        for T in T_values:
            report.add(_skipped(f"universal_bound_T{T}", "not stated for pricing runs"))
        return

    for T in T_values:
        name = f"universal_bound_T{T}"
        if len(outcomes) < T:
            report.add(_skipped(name, f"run shorter than T={T}"))
            continue
        result = check_universal_bound(run, T, p)
        detail = f"frames={result.frames}, mean c*={result.mean_c_star:.6g}, BT/V={result.fudge:.6g}"
        if not result.conclusive:
            detail += f", {len(result.excluded_frames)} infeasible frames excluded"
        report.add(VerificationCheck(name, result.passed, result.lhs, result.rhs, detail=detail))


def _supply_delay_check(run: "RunRecord", bounds: DerivedBounds) -> VerificationCheck:
    completed = run.delay_stats.completed
    per_batch = supply_delay_bounds(run.trace.s, [b.arrival_slot for b in completed], bounds.Q_max)
    violations = sum(
        1 for batch, bound in zip(completed, per_batch)
        if bound is not UNBOUNDED and batch.delay > bound
    )
    finite = [b for b in per_batch if b is not UNBOUNDED]
    return VerificationCheck(
        name="supply_delay_bound",
        passed=violations == 0,
        measured=run.delay_stats.max_delay,
        bound=max(finite) if finite else math.inf,
        detail=f"D_max unbounded (epsilon = 0); {violations} batches exceed their supply bound",
    )


def _verify_greedy(run: "RunRecord", p: Params, report: VerificationReport):
    for name in ("Q_bound", "Z_bound", "delay_bound", "bang_bang", "drift_inequality"):
        report.add(_skipped(name, "not applicable to the greedy baseline"))

    deadline = run.greedy_deadline
    max_delay = run.delay_stats.max_delay
    report.add(VerificationCheck("deadline", max_delay <= deadline, max_delay, deadline))

    stray = sum(1 for o in run.outcomes if o.x > 0 and not o.deadline_hit)
    report.add(VerificationCheck("purchase_only_at_deadline", stray == 0, stray, 0))

    report.add(VerificationCheck(
        "x_max_excess", run.x_max_excess_slots == 0, run.x_max_excess_slots, 0,
        detail=f"slots whose forced purchase exceeded x_max={p.x_max:g}",
    ))

    arrivals = sum(o.a for o in run.outcomes)
    accounted = run.supply_served_total + run.purchased_total + run.pending_total
    report.add(VerificationCheck(
        "greedy_conservation", _close(arrivals, accounted), accounted, arrivals,
        detail="supply served + purchased + pending = arrivals",
    ))


def _verify_conservation(run: "RunRecord", report: VerificationReport):
    arrivals = sum(o.a for o in run.outcomes)
    accounted = run.served_total + run.pending_total
    served_ok = _close(run.served_total, sum(o.served for o in run.outcomes))
    report.add(VerificationCheck(
        "tracker_conservation", _close(arrivals, accounted) and served_ok, accounted, arrivals,
        detail="served + pending = enqueued",
    ))
