"""Delay tracking, lookahead oracles and run verification."""

from analysis.fifo_tracker import (
    ArrivalBatch,
    CompletedBatch,
    DelayStats,
    FifoTracker,
    apply_service,
    verify_delay_bound,
)
from analysis.oracle import (
    FrameOracleResult,
    UniversalBoundReport,
    brute_force_frame,
    check_universal_bound,
    frame_costs,
    iid_cost_oracle,
    solve_frame,
    stationary_profit_oracle,
)

__all__ = [
    "ArrivalBatch",
    "CompletedBatch",
    "DelayStats",
    "FifoTracker",
    "apply_service",
    "verify_delay_bound",
    "FrameOracleResult",
    "UniversalBoundReport",
    "brute_force_frame",
    "check_universal_bound",
    "frame_costs",
    "iid_cost_oracle",
    "solve_frame",
    "stationary_profit_oracle",
]
