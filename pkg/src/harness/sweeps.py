"""
Parameter sweeps and policy comparison.

Sweep points are independent runs and execute on a thread pool; results
are reassembled in the order of the requested values so output does not
depend on scheduling.
"""

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np

from core.errors import ParamsValidationError
from core.models import DelayBound, Params
from core.queue_dynamics import derived_bounds, validate_params
from harness.runner import PolicyKind, RunOptions, RunRecord, run_policy
from traces.models import Trace

logger = logging.getLogger(__name__)

DEFAULT_MAX_WORKERS = 4


class SweepAxis(Enum):
    V = "V"
    EPSILON = "epsilon"


@dataclass(frozen=True)
class SweepRow:
    """Summary of one sweep point"""
    value: float
    cum_cost: float  # gamma * actual purchase
    max_delay: float
    max_Q: float
    max_Z: float
    D_max: DelayBound
    cum_cost_x: float  # gamma * decision x

    def to_dict(self) -> Dict[str, object]:
        return {
            "value": self.value,
            "cum_cost": self.cum_cost,
            "max_delay": self.max_delay,
            "max_Q": self.max_Q,
            "max_Z": self.max_Z,
            "D_max": self.D_max,
            "cum_cost_x": self.cum_cost_x,
        }


def _point_params(p: Params, axis: SweepAxis, value: float) -> Params:
    if axis is SweepAxis.V:
        if not value > 0:
            raise ParamsValidationError(f"sweep values for V must be positive (got {value})", rule="V > 0")
        return validate_params(replace(p, V=float(value)))
    if value < 0:
        raise ParamsValidationError(
            f"sweep values for epsilon must be non-negative (got {value})", rule="epsilon >= 0"
        )
    return validate_params(replace(p, epsilon=float(value)))


def summarize(value: float, run: RunRecord) -> SweepRow:
    return SweepRow(
        value=float(value),
        cum_cost=run.total_cost,
        max_delay=float(run.delay_stats.max_delay),
        max_Q=run.max_Q,
        max_Z=run.max_Z,
        D_max=run.bounds.D_max,
        cum_cost_x=run.total_cost_x,
    )


def sweep(trace: Trace, p: Params, axis: SweepAxis, values: Sequence[float],
          policy: PolicyKind = PolicyKind.LYAPUNOV, options: Optional[RunOptions] = None,
          max_workers: int = DEFAULT_MAX_WORKERS) -> List[SweepRow]:
    """One summary row per value of ``axis``, in the order given.

    Raises:
        ParamsValidationError: a value outside its admissible range, or one
            that makes the parameter set invalid (e.g. epsilon > x_max)
    """
    options = options or RunOptions()
    # validate every point before any run starts
    points = [_point_params(p, axis, value) for value in values]
    logger.info(f"🔄 Sweeping {axis.value} over {len(points)} values ({policy.value})")

    rows: List[Optional[SweepRow]] = [None] * len(points)
    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as executor:
        future_to_index = {
            executor.submit(run_policy, trace, policy, point, options): index
            for index, point in enumerate(points)
        }
        for future in as_completed(future_to_index):
            index = future_to_index[future]
            rows[index] = summarize(values[index], future.result())
            logger.debug(f"Sweep point {axis.value}={values[index]:g} done")
    return rows


def average_sweeps(tables: Sequence[List[SweepRow]]) -> List[SweepRow]:
    """Point-wise mean of sweeps over the same values (seed averaging)."""
    if not tables:
        return []
    averaged = []
    for rows in zip(*tables):
        averaged.append(SweepRow(
            value=rows[0].value,
            cum_cost=float(np.mean([r.cum_cost for r in rows])),
            max_delay=float(np.mean([r.max_delay for r in rows])),
            max_Q=float(np.mean([r.max_Q for r in rows])),
            max_Z=float(np.mean([r.max_Z for r in rows])),
            D_max=rows[0].D_max,
            cum_cost_x=float(np.mean([r.cum_cost_x for r in rows])),
        ))
    return averaged


@dataclass
class Comparison:
    """Lyapunov allocator against purchase-at-deadline on one trace"""
    lyapunov: RunRecord
    greedy: RunRecord

    @property
    def deadline(self) -> int:
        return self.greedy.greedy_deadline

    @property
    def cost_ratio(self) -> float:
        """Greedy cost over Lyapunov cost (actual purchases)."""
        if self.lyapunov.total_cost == 0:
            return float("inf") if self.greedy.total_cost > 0 else 1.0
        return self.greedy.total_cost / self.lyapunov.total_cost

    @property
    def cost_ratio_x(self) -> float:
        if self.lyapunov.total_cost_x == 0:
            return float("inf") if self.greedy.total_cost > 0 else 1.0
        return self.greedy.total_cost / self.lyapunov.total_cost_x

    def summary(self) -> Dict[str, object]:
        return {
            "deadline": self.deadline,
            "lyapunov_cost": self.lyapunov.total_cost,
            "lyapunov_cost_x": self.lyapunov.total_cost_x,
            "greedy_cost": self.greedy.total_cost,
            "cost_ratio": self.cost_ratio,
            "cost_ratio_x": self.cost_ratio_x,
            "lyapunov_max_delay": self.lyapunov.delay_stats.max_delay,
            "greedy_max_delay": self.greedy.delay_stats.max_delay,
            "greedy_deadline_fraction": self.greedy.deadline_fraction(),
        }


def compare(trace: Trace, p: Params, options: Optional[RunOptions] = None) -> Comparison:
    """Run both policies with the greedy deadline matched to D_max (unless set)."""
    options = options or RunOptions()
    if options.greedy_deadline is None:
        bound = derived_bounds(validate_params(p)).D_max
        if isinstance(bound, int):
            options = replace(options, greedy_deadline=bound)
    with ThreadPoolExecutor(max_workers=2) as executor:
        lyapunov = executor.submit(run_policy, trace, PolicyKind.LYAPUNOV, p, options)
        greedy = executor.submit(run_policy, trace, PolicyKind.GREEDY, p, options)
        result = Comparison(lyapunov=lyapunov.result(), greedy=greedy.result())
    logger.info(
        f"📊 Greedy/Lyapunov cost ratio {result.cost_ratio:.3f} (deadline {result.deadline} slots)"
    )
    return result
