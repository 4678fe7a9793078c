"""Trace containers and generator specifications."""

from dataclasses import dataclass, field, asdict
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from core.models import SlotObservation

DEFAULT_SLOT_MINUTES = 10


@dataclass(frozen=True)
class TraceMeta:
    """Provenance of a trace: source file or generator spec + seed, and declared bounds"""
    source: str
    seed: Optional[int] = None
    generator: Optional[Dict[str, Any]] = None
    s_max: Optional[float] = None
    a_max: Optional[float] = None
    gamma_max: Optional[float] = None


@dataclass
class Trace:
    """Ordered per-slot observations"""
    slots: List[SlotObservation]
    slot_minutes: int = DEFAULT_SLOT_MINUTES
    meta: TraceMeta = field(default_factory=lambda: TraceMeta(source="inline"))

    def __len__(self) -> int:
        return len(self.slots)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return Trace(self.slots[index], self.slot_minutes, self.meta)
        return self.slots[index]

    @property
    def has_demand_state(self) -> bool:
        return any(obs.y is not None for obs in self.slots)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(obs, name) for obs in self.slots], dtype=float)

    @property
    def s(self) -> np.ndarray:
        return self.column("s")

    @property
    def a(self) -> np.ndarray:
        return self.column("a")

    @property
    def gamma(self) -> np.ndarray:
        return self.column("gamma")

    def duration_hours(self, slots: float) -> float:
        return slots * self.slot_minutes / 60.0


class GeneratorKind(Enum):
    IID_UNIFORM = "iid"
    MARKOV = "markov"
    PRICE_SPIKE = "spike"
    CONSTANT = "constant"


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of a synthetic trace family.

    Defaults are the experiment constants: demand uniform on the integers
    {0..175}, supply in [0, 90], prices in [0, 180].
    """
    kind: GeneratorKind = GeneratorKind.IID_UNIFORM
    seed: int = 0
    a_max: float = 175.0
    s_low: float = 0.0
    s_high: float = 90.0
    gamma_low: float = 0.0
    gamma_high: float = 180.0
    integer_demand: bool = True
    # PRICE_SPIKE
    base_price: float = 10.0
    spike_price: float = 180.0
    spike_prob: float = 0.05
    # MARKOV: per-process HIGH/LOW modulation
    p_high_to_low: float = 0.05
    p_low_to_high: float = 0.05
    # demand state y (pricing mode); LOW/HIGH levels for MARKOV, constant otherwise
    demand_state: bool = False
    y_low: float = 0.5
    y_high: float = 1.0
    # CONSTANT
    constant_s: float = 0.0
    constant_a: float = 0.0
    constant_gamma: float = 0.0
    constant_y: Optional[float] = None

    @property
    def s_max(self) -> float:
        if self.kind is GeneratorKind.CONSTANT:
            return self.constant_s
        return self.s_high

    @property
    def gamma_max(self) -> float:
        if self.kind is GeneratorKind.CONSTANT:
            return self.constant_gamma
        if self.kind is GeneratorKind.PRICE_SPIKE:
            return max(self.base_price, self.spike_price)
        return self.gamma_high

    @property
    def declared_a_max(self) -> float:
        if self.kind is GeneratorKind.CONSTANT:
            return self.constant_a
        return self.a_max

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["kind"] = self.kind.value
        return data
