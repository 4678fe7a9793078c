#!/usr/bin/env python3
"""
oracle.py

Purpose:
  Lookahead and stationary oracles used to judge the online policies.

  - solve_frame: optimal purchase plan for a T-slot frame with full
    knowledge of supply, demand and prices inside the frame
  - brute_force_frame: exhaustive grid enumeration of the same problem
  - check_universal_bound: achieved average cost versus the frame
    oracle average plus B*T/V
  - stationary oracles for constant / i.i.d. environments

Version: 1.0.0
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, List, Optional, Sequence, Tuple

import numpy as np

from core.errors import InfeasibleFrameError
from core.models import Params, SlotObservation
from core.queue_dynamics import DRIFT_SLACK, derived_bounds

if TYPE_CHECKING:
    from harness.runner import RunRecord
    from policies.pricing import DemandModel

logger = logging.getLogger(__name__)

FEASIBILITY_TOLERANCE = 1e-9

BINDING_DEMAND = "demand"
BINDING_EPSILON = "epsilon"
BINDING_NONE = "none"


@dataclass(frozen=True)
class FrameOracleResult:
    """Optimal frame-average cost, per-slot allocation and the binding constraint"""
    c_star: float
    x_star: Tuple[float, ...]
    binding: str
    required: float


def _required_purchase(frame: Sequence[SlotObservation], epsilon: float) -> Tuple[float, str]:
    T = len(frame)
    total_s = sum(obs.s for obs in frame)
    demand_gap = sum(obs.a for obs in frame) - total_s
    epsilon_gap = epsilon * T - total_s
    required = max(demand_gap, epsilon_gap, 0.0)
    if required <= 0:
        return 0.0, BINDING_NONE
    return required, BINDING_DEMAND if demand_gap >= epsilon_gap else BINDING_EPSILON


def _is_feasible(required: float, capacity: float) -> bool:
    return required <= capacity + FEASIBILITY_TOLERANCE * max(1.0, capacity)


def solve_frame(frame: Sequence[SlotObservation], epsilon: float, x_max: float) -> FrameOracleResult:
    """Cheapest-slots-first solution of the frame purchase problem.

    Every purchased unit counts identically towards both the demand and
    the epsilon requirement, so filling slots in ascending price order
    (ties by slot index) up to x_max each is optimal.

    Raises:
        ValueError: if the frame is empty
        InfeasibleFrameError: if the requirement exceeds T * x_max
    """
    if not frame:
        raise ValueError("frame must contain at least one slot")
    T = len(frame)
    required, binding = _required_purchase(frame, epsilon)
    capacity = T * x_max
    if not _is_feasible(required, capacity):
        raise InfeasibleFrameError(required, capacity)

    x_star = [0.0] * T
    remaining = required
    for index in sorted(range(T), key=lambda i: (frame[i].gamma, i)):
        if remaining <= 0:
            break
        fill = min(x_max, remaining)
        x_star[index] = fill
        remaining -= fill

    total = sum(obs.gamma * x for obs, x in zip(frame, x_star))
    return FrameOracleResult(c_star=total / T, x_star=tuple(x_star), binding=binding, required=required)


def brute_force_frame(frame: Sequence[SlotObservation], epsilon: float, x_max: float,
                      grid: float) -> float:
    """Minimum frame-average cost over all grid-valued allocations.

    Only meant for tiny frames (a handful of slots and levels).
    """
    if not frame:
        raise ValueError("frame must contain at least one slot")
    if grid <= 0:
        raise ValueError("grid must be positive")
    T = len(frame)
    levels = [k * grid for k in range(int(math.floor(x_max / grid + 1e-9)) + 1)]
    total_s = sum(obs.s for obs in frame)
    total_a = sum(obs.a for obs in frame)

    best: Optional[float] = None
    for allocation in itertools.product(levels, repeat=T):
        bought = sum(allocation)
        if total_s + bought - total_a < -FEASIBILITY_TOLERANCE:
            continue
        if total_s + bought - epsilon * T < -FEASIBILITY_TOLERANCE:
            continue
        cost = sum(obs.gamma * x for obs, x in zip(frame, allocation))
        if best is None or cost < best:
            best = cost
    if best is None:
        required, _ = _required_purchase(frame, epsilon)
        raise InfeasibleFrameError(required, T * x_max)
    return best / T


def frame_costs(gamma: np.ndarray, s: np.ndarray, a: np.ndarray, epsilon: float,
                x_max: float, T: int) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorised ``solve_frame`` over consecutive T-slot frames.

    Returns the optimal frame-average cost of each of the first
    R = len // T frames and a mask of the feasible ones (infeasible
    frames get cost NaN).
    """
    R = len(gamma) // T
    g = np.asarray(gamma[: R * T], dtype=float).reshape(R, T)
    supply = np.asarray(s[: R * T], dtype=float).reshape(R, T).sum(axis=1)
    demand = np.asarray(a[: R * T], dtype=float).reshape(R, T).sum(axis=1)

    required = np.maximum.reduce([demand - supply, epsilon * T - supply, np.zeros(R)])
    capacity = T * x_max
    feasible = required <= capacity + FEASIBILITY_TOLERANCE * max(1.0, capacity)

    g_sorted = np.sort(g, axis=1, kind="stable")
    filled_before = np.arange(T, dtype=float) * x_max
    x_sorted = np.clip(required[:, None] - filled_before[None, :], 0.0, x_max)
    costs = (g_sorted * x_sorted).sum(axis=1) / T
    costs[~feasible] = np.nan
    return costs, feasible


@dataclass
class UniversalBoundReport:
    """Both sides of the frame-lookahead cost bound for one frame size T"""
    T: int
    frames: int
    lhs: float  # average gamma * x over the first R*T slots
    lhs_actual: float  # same with the actual purchase
    mean_c_star: float
    fudge: float  # B * T / V
    rhs: float
    passed: bool
    excluded_frames: List[int] = field(default_factory=list)

    @property
    def conclusive(self) -> bool:
        return not self.excluded_frames


def check_universal_bound(run: "RunRecord", T: int, p: Params) -> UniversalBoundReport:
    """Compare a run's average cost with the frame-oracle average plus B*T/V."""
    n = len(run.outcomes)
    if T < 1 or n < T:
        raise ValueError(f"need at least T={T} slots, run has {n}")
    R = n // T
    slots = run.trace.slots

    gamma = np.array([obs.gamma for obs in slots[: R * T]])
    s = np.array([obs.s for obs in slots[: R * T]])
    a = np.array([o.a for o in run.outcomes[: R * T]])
    costs, feasible = frame_costs(gamma, s, a, p.epsilon, p.x_max, T)

    excluded = [int(r) for r in np.flatnonzero(~feasible)]
    if excluded:
        logger.warning(
            f"⚠️  T={T}: {len(excluded)} of {R} frames are infeasible under x_max and were excluded"
        )
    mean_c_star = float(np.mean(costs[feasible])) if feasible.any() else 0.0

    lhs = float(np.sum([o.cost_x for o in run.outcomes[: R * T]])) / (R * T)
    lhs_actual = float(np.sum([o.cost for o in run.outcomes[: R * T]])) / (R * T)
    fudge = derived_bounds(p).B * T / p.V
    rhs = mean_c_star + fudge
    passed = lhs <= rhs + DRIFT_SLACK * max(1.0, abs(rhs))
    if not passed:
        logger.error(f"❌ Universal bound violated for T={T}: {lhs:.6g} > {rhs:.6g}")
    return UniversalBoundReport(
        T=T,
        frames=R,
        lhs=lhs,
        lhs_actual=lhs_actual,
        mean_c_star=mean_c_star,
        fudge=fudge,
        rhs=rhs,
        passed=passed,
        excluded_frames=excluded,
    )


def iid_cost_oracle(gamma: float, mean_a: float, mean_s: float) -> float:
    """Optimal average cost for a constant price: every unit of demand not
    covered by supply on average is eventually bought at that price."""
    return gamma * max(mean_a - mean_s, 0.0)


@dataclass(frozen=True)
class StationaryProfitResult:
    phi_star: float
    a_star: float
    price: float
    purchase: float


def stationary_profit_oracle(s: float, y: Optional[float], gamma: float, demand: "DemandModel",
                             p: Params, p_step: float = 1e-3,
                             x_step: float = 1e-3) -> StationaryProfitResult:
    """Best stationary (price, purchase) pair on a constant environment.

    Maximises p * F(p) - gamma * x over a price grid and a purchase grid
    subject to F(p) <= s + x and x <= x_max. Profit falls with x, so for
    each price only the smallest feasible grid purchase is considered.
    ``a_star`` is the largest demand among the maximisers.
    """
    from policies.pricing import price_grid

    prices = price_grid(p.p_max, p_step) if p.p_max > 0 else np.zeros(1)
    F = demand.evaluate(prices, y, gamma)
    shortfall = np.maximum(F - s, 0.0)
    x = np.ceil(shortfall / x_step - 1e-9) * x_step
    feasible = x <= p.x_max + FEASIBILITY_TOLERANCE
    values = np.where(feasible, prices * F - gamma * x, -np.inf)

    phi_star = float(np.max(values))
    winners = np.flatnonzero(values >= phi_star - 1e-12)
    best = winners[int(np.argmax(F[winners]))]
    return StationaryProfitResult(
        phi_star=phi_star,
        a_star=float(F[best]),
        price=float(prices[best]),
        purchase=float(x[best]),
    )
