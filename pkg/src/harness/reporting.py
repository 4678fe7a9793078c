"""
Plot-ready CSV and JSON output.

Numbers are written with ``repr`` so identical runs give byte-identical
files. Nothing here draws figures.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

from analysis.oracle import FrameOracleResult
from analysis.verification import VerificationReport
from harness.runner import PolicyKind, RunRecord
from harness.sweeps import Comparison, SweepRow
from traces.models import Trace

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

TRAJECTORY_COLUMNS = ["slot", "Q", "Z", "x", "x_actual", "cost_x", "cost_x_actual", "served"]
PRICING_COLUMNS = ["a", "b", "p", "profit", "profit_actual"]
HISTOGRAM_COLUMNS = ["delay_slots", "count", "log10_count"]
SWEEP_COLUMNS = ["value", "cum_cost", "max_delay", "max_Q", "max_Z", "D_max", "cum_cost_x"]
COMPARISON_COLUMNS = ["slot", "lyapunov_cum_cost", "lyapunov_cum_cost_x", "greedy_cum_cost"]
VERIFICATION_COLUMNS = ["check", "status", "measured", "bound", "detail"]
FRAME_COLUMNS = ["slot", "gamma", "s", "a", "x_star"]


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_rows(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_cell(value) for value in row])
    logger.debug(f"Wrote {path}")
    return path


def write_trajectory(run: RunRecord, path: PathLike) -> Path:
    """Per-slot state, decisions and both cost columns."""
    pricing = run.policy is PolicyKind.PRICING
    header = TRAJECTORY_COLUMNS + (PRICING_COLUMNS if pricing else [])

    def rows():
        for outcome, Q, Z in zip(run.outcomes, run.q_trajectory, run.z_trajectory):
            row = [outcome.slot, Q, Z, outcome.x, outcome.x_actual, outcome.cost_x, outcome.cost, outcome.served]
            if pricing:
                row += [outcome.a, outcome.b, outcome.p, outcome.profit, outcome.profit_actual]
            yield row

    return write_rows(path, header, rows())


def write_histogram(run: RunRecord, path: PathLike) -> Path:
    rows = (
        [r["delay_slots"], r["count"], r["log10_count"]]
        for r in run.delay_stats.histogram_rows()
    )
    return write_rows(path, HISTOGRAM_COLUMNS, rows)


def write_sweep(rows: List[SweepRow], path: PathLike) -> Path:
    def cells():
        for row in rows:
            data = row.to_dict()
            yield [data[column] for column in SWEEP_COLUMNS]

    return write_rows(path, SWEEP_COLUMNS, cells())


def write_comparison(comparison: Comparison, path: PathLike) -> Path:
    """Cumulative cost curves of both policies, slot by slot."""
    lyapunov = comparison.lyapunov.cumulative_cost
    lyapunov_x = comparison.lyapunov.cumulative_cost_x
    greedy = comparison.greedy.cumulative_cost
    rows = (
        [slot, float(lyapunov[slot]), float(lyapunov_x[slot]), float(greedy[slot])]
        for slot in range(len(lyapunov))
    )
    return write_rows(path, COMPARISON_COLUMNS, rows)


def write_verification(report: VerificationReport, path: PathLike) -> Path:
    rows = ([r[column] for column in VERIFICATION_COLUMNS] for r in report.to_rows())
    return write_rows(path, VERIFICATION_COLUMNS, rows)


def write_frame_solution(trace: Trace, result: FrameOracleResult, path: PathLike, offset: int = 0) -> Path:
    rows = (
        [offset + index, obs.gamma, obs.s, obs.a, x]
        for index, (obs, x) in enumerate(zip(trace.slots, result.x_star))
    )
    return write_rows(path, FRAME_COLUMNS, rows)


def write_json(data: Dict[str, Any], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True, default=str)
    return path
