"""
CSV trace interchange.

Schema: header ``slot,s,a,gamma[,y]``, one row per slot, 0-based contiguous
slot indices, UTF-8, comma separated. An empty y cell means the slot has no
demand state. Floats are written with ``repr`` so
``load_csv(write_csv(trace))`` reproduces every value bit for bit.
"""

import csv
import logging
import math
from pathlib import Path
from typing import Optional, Union

from core.errors import TraceBoundsError, TraceFormatError
from core.models import Params, SlotObservation
from traces.models import DEFAULT_SLOT_MINUTES, Trace, TraceMeta

logger = logging.getLogger(__name__)

BASE_COLUMNS = ["slot", "s", "a", "gamma"]
PathLike = Union[str, Path]


def format_number(value: float) -> str:
    return repr(float(value))


def write_csv(trace: Trace, path: PathLike) -> Path:
    """Write a trace in the canonical CSV schema."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with_y = trace.has_demand_state
    header = BASE_COLUMNS + (["y"] if with_y else [])
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for index, obs in enumerate(trace.slots):
            row = [str(index), format_number(obs.s), format_number(obs.a), format_number(obs.gamma)]
            if with_y:
                row.append("" if obs.y is None else format_number(obs.y))
            writer.writerow(row)
    logger.info(f"💾 Wrote {len(trace)} slots to {path}")
    return path


def _parse_value(raw: str, column: str, line_number: int) -> float:
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise TraceFormatError(f"column {column!r}: cannot parse {raw!r} as a number", line_number)
    if not math.isfinite(value) or value < 0:
        raise TraceBoundsError(column, value, line_number=line_number)
    return value


def check_bounds(obs: SlotObservation, s_max: Optional[float], a_max: Optional[float],
                 gamma_max: Optional[float], line_number: Optional[int] = None):
    """Raise TraceBoundsError if an observation exceeds a declared bound."""
    for column, value, bound in (("s", obs.s, s_max), ("a", obs.a, a_max), ("gamma", obs.gamma, gamma_max)):
        if not math.isfinite(value) or value < 0:
            raise TraceBoundsError(column, value, line_number=line_number)
        if bound is not None and value > bound:
            raise TraceBoundsError(column, value, bound, line_number=line_number)
    if obs.y is not None and (not math.isfinite(obs.y) or obs.y < 0):
        raise TraceBoundsError("y", obs.y, line_number=line_number)


def load_csv(path: PathLike, params: Optional[Params] = None,
             slot_minutes: int = DEFAULT_SLOT_MINUTES) -> Trace:
    """Parse and validate a trace file.

    Args:
        path: CSV file in the canonical schema
        params: when given, every row is checked against s_max, a_max and gamma_max
        slot_minutes: slot duration recorded on the trace

    Raises:
        FileNotFoundError: if the file does not exist
        TraceFormatError: bad header, wrong column count, unparsable or
            non-contiguous rows (line number reported)
        TraceBoundsError: NaN, negative or out-of-bound values
    """
    path = Path(path)
    s_max = params.s_max if params else None
    a_max = params.a_max if params else None
    gamma_max = params.gamma_max if params else None

    slots = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None:
            raise TraceFormatError("empty file", 1)
        header = [column.strip() for column in header]
        if header not in (BASE_COLUMNS, BASE_COLUMNS + ["y"]):
            raise TraceFormatError(
                f"header must be {','.join(BASE_COLUMNS)}[,y], got {','.join(header)}", 1
            )
        with_y = len(header) == 5

        for line_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise TraceFormatError(f"expected {len(header)} columns, got {len(row)}", line_number)
            try:
                index = int(row[0])
            except ValueError:
                raise TraceFormatError(f"slot index {row[0]!r} is not an integer", line_number)
            if index != len(slots):
                raise TraceFormatError(f"slot index {index} out of sequence (expected {len(slots)})", line_number)

            values = [_parse_value(raw, column, line_number) for raw, column in zip(row[1:4], header[1:4])]
            y = None
            if with_y and row[4].strip() != "":
                y = _parse_value(row[4], "y", line_number)
            obs = SlotObservation(s=values[0], a=values[1], gamma=values[2], y=y)
            check_bounds(obs, s_max, a_max, gamma_max, line_number)
            slots.append(obs)

    meta = TraceMeta(source=str(path), s_max=s_max, a_max=a_max, gamma_max=gamma_max)
    logger.info(f"📂 Loaded {len(slots)} slots from {path}")
    return Trace(slots=slots, slot_minutes=slot_minutes, meta=meta)
