"""Exception hierarchy shared by every package of the simulator."""

from typing import Optional


class EnergySimError(Exception):
    """Base class for all simulator errors."""


class ParamsValidationError(EnergySimError, ValueError):
    """Raised when a parameter set violates one of the validity rules."""

    def __init__(self, message: str, rule: str = ""):
        super().__init__(message)
        self.rule = rule


class TraceFormatError(EnergySimError, ValueError):
    """Malformed trace file (bad header, unparsable row, non-contiguous slots)."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class TraceBoundsError(EnergySimError, ValueError):
    """An observation lies outside its declared bounds."""

    def __init__(self, column: str, value: float, bound: Optional[float] = None,
                 line_number: Optional[int] = None):
        if bound is None:
            message = f"{column}={value!r} is not a finite non-negative number"
        else:
            message = f"{column}={value!r} exceeds bound {bound!r}"
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.column = column
        self.value = value
        self.bound = bound
        self.line_number = line_number


class InfeasibleFrameError(EnergySimError):
    """No allocation within the per-slot cap meets the frame requirements."""

    def __init__(self, required: float, capacity: float):
        super().__init__(
            f"frame needs {required:g} units of purchased energy but at most "
            f"{capacity:g} can be bought"
        )
        self.required = required
        self.capacity = capacity
