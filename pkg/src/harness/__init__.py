"""Simulation runs, sweeps, CSV reporting and the command-line interface."""

from harness.runner import PolicyKind, RunOptions, RunRecord, run_policy
from harness.sweeps import Comparison, SweepAxis, SweepRow, average_sweeps, compare, sweep

__all__ = [
    "PolicyKind",
    "RunOptions",
    "RunRecord",
    "run_policy",
    "Comparison",
    "SweepAxis",
    "SweepRow",
    "average_sweeps",
    "compare",
    "sweep",
]
