#!/usr/bin/env python3
"""
pricing.py

Purpose:
  Joint pricing and allocation policy. Each slot the plant posts a price,
  decides whether to accept new requests at all, realises the resulting
  demand and then runs the threshold allocation rule.

Version: 1.0.0
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np

from core.models import Params, SchedulerState, SlotObservation, SlotOutcome
from core.queue_dynamics import update_queue, update_virtual_queue, validate_params
from policies.allocator import actual_purchase, decide_purchase

logger = logging.getLogger(__name__)

# Grid resolution used when no explicit step is given: p_max / 10^4
DEFAULT_GRID_DIVISIONS = 10_000

BaseCurve = Callable[[np.ndarray, float], np.ndarray]


class RealizationMode(Enum):
    DETERMINISTIC = "deterministic"
    UNIFORM_NOISE = "uniform"


class DemandModel(ABC):
    """Expected requests F(p, y, gamma) as a function of the posted price."""

    def __init__(self, a_max: float):
        self.a_max = a_max

    @property
    @abstractmethod
    def name(self) -> str:
        ...

    @abstractmethod
    def evaluate(self, prices: np.ndarray, y: Optional[float], gamma: float) -> np.ndarray:
        """Expected arrivals for each price (vectorised over ``prices``)."""

    def policy_curve(self, prices: np.ndarray, y: Optional[float], gamma: float) -> np.ndarray:
        """Curve the pricing rule maximises against; defaults to ``evaluate``."""
        return self.evaluate(prices, y, gamma)

    def expected(self, price: float, y: Optional[float], gamma: float) -> float:
        return float(self.evaluate(np.asarray([price], dtype=float), y, gamma)[0])


class LinearDemand(DemandModel):
    """F = y * a_max * max(0, 1 - p / p_max), capped at a_max."""

    def __init__(self, a_max: float, p_max: float):
        super().__init__(a_max)
        if p_max <= 0:
            raise ValueError("linear demand needs p_max > 0")
        self.p_max = p_max

    @property
    def name(self) -> str:
        return "linear"

    def evaluate(self, prices: np.ndarray, y: Optional[float], gamma: float) -> np.ndarray:
        level = 1.0 if y is None else y
        curve = level * self.a_max * np.maximum(0.0, 1.0 - np.asarray(prices, dtype=float) / self.p_max)
        return np.minimum(curve, self.a_max)

    def closed_form_price(self, Q: float, V: float) -> float:
        """Exact maximiser of F * (V p - Q) over [0, p_max] while the a_max cap is inactive."""
        return min(max(0.5 * (self.p_max + Q / V), 0.0), self.p_max)


class ScaledDemand(DemandModel):
    """F = y * base(p, gamma). The pricing rule never reads y."""

    def __init__(self, a_max: float, base: BaseCurve, label: str = "scaled"):
        super().__init__(a_max)
        self.base = base
        self.label = label

    @property
    def name(self) -> str:
        return self.label

    def evaluate(self, prices: np.ndarray, y: Optional[float], gamma: float) -> np.ndarray:
        level = 1.0 if y is None else y
        return level * np.asarray(self.base(np.asarray(prices, dtype=float), gamma), dtype=float)

    def policy_curve(self, prices: np.ndarray, y: Optional[float], gamma: float) -> np.ndarray:
        return np.asarray(self.base(np.asarray(prices, dtype=float), gamma), dtype=float)


def constant_demand(a_max: float, level: float) -> ScaledDemand:
    """Price-insensitive demand F = y * level."""
    return ScaledDemand(a_max, lambda prices, gamma: np.full_like(prices, level), label="constant")


def scaled_linear_demand(a_max: float, p_max: float) -> ScaledDemand:
    return ScaledDemand(
        a_max,
        lambda prices, gamma: a_max * np.maximum(0.0, 1.0 - prices / p_max),
        label="scaled-linear",
    )


def scaled_exponential_demand(a_max: float, p_max: float, rate: float = 3.0) -> ScaledDemand:
    return ScaledDemand(
        a_max,
        lambda prices, gamma: a_max * np.exp(-rate * prices / p_max),
        label="scaled-exp",
    )


@dataclass(frozen=True)
class PricingDecision:
    """Accept flag, posted price and the maximised objective F * (V p - Q)"""
    b: int
    p: float
    objective: float


def price_grid(p_max: float, grid_step: float) -> np.ndarray:
    """{0, step, 2*step, ...} up to p_max, with p_max always included."""
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    count = int(math.floor(p_max / grid_step + 1e-9))
    grid = np.arange(count + 1, dtype=float) * grid_step
    grid = grid[grid <= p_max]
    if grid.size == 0 or grid[-1] < p_max:
        grid = np.append(grid, p_max)
    return grid


def optimize_price(Q: float, obs: SlotObservation, p: Params, demand: DemandModel,
                   grid_step: Optional[float] = None) -> PricingDecision:
    """Grid search for the price maximising F * (V p - Q).

    Ties are broken toward the largest price. Requests are accepted
    (b = 1) when the maximum is non-negative.
    """
    step = grid_step if grid_step is not None else p.p_max / DEFAULT_GRID_DIVISIONS
    if p.p_max == 0:
        prices = np.zeros(1)
    else:
        prices = price_grid(p.p_max, step)

    objective = demand.policy_curve(prices, obs.y, obs.gamma) * (p.V * prices - Q)
    # argmax on the reversed grid picks the largest price among ties
    best = prices.size - 1 - int(np.argmax(objective[::-1]))
    value = float(objective[best])
    return PricingDecision(b=1 if value >= 0 else 0, p=float(prices[best]), objective=value)


def realize_demand(decision: PricingDecision, obs: SlotObservation, demand: DemandModel,
                   rng: np.random.Generator,
                   mode: RealizationMode = RealizationMode.DETERMINISTIC) -> float:
    """Draw the arrivals of a slot with conditional mean F(p, y, gamma)."""
    if decision.b == 0:
        return 0.0
    mean = min(max(demand.expected(decision.p, obs.y, obs.gamma), 0.0), demand.a_max)
    if mode is RealizationMode.DETERMINISTIC:
        return mean
    low = max(0.0, 2.0 * mean - demand.a_max)
    high = min(demand.a_max, 2.0 * mean)
    return float(rng.uniform(low, high))


def profit(b: int, p: float, a: float, gamma: float, x_used: float) -> float:
    return b * p * a - gamma * x_used


@dataclass
class PricingPolicy:
    """Single-owner joint pricing and allocation policy."""
    params: Params
    demand: DemandModel
    rng: np.random.Generator
    mode: RealizationMode = RealizationMode.DETERMINISTIC
    grid_step: Optional[float] = None
    state: SchedulerState = field(default_factory=SchedulerState)
    slot: int = 0

    def __post_init__(self):
        validate_params(self.params)
        if self.params.p_max <= 0:
            logger.warning("⚠️  p_max is 0: every posted price will be 0")

    def step(self, obs: SlotObservation) -> SlotOutcome:
        Q, Z = self.state.Q, self.state.Z
        decision = optimize_price(Q, obs, self.params, self.demand, self.grid_step)
        a = realize_demand(decision, obs, self.demand, self.rng, self.mode)

        x = decide_purchase(self.state, obs.gamma, self.params)
        x_actual = actual_purchase(Q, obs.s, x)
        served = min(Q, obs.s + x)

        self.state = SchedulerState(
            Q=update_queue(Q, obs.s, x, a),
            Z=update_virtual_queue(Z, obs.s, x, self.params.epsilon, Q > 0),
        )
        outcome = SlotOutcome(
            slot=self.slot,
            x=x,
            x_actual=x_actual,
            cost=obs.gamma * x_actual,
            cost_x=obs.gamma * x,
            served=served,
            a=a,
            b=decision.b,
            p=decision.p,
            profit=profit(decision.b, decision.p, a, obs.gamma, x),
            profit_actual=profit(decision.b, decision.p, a, obs.gamma, x_actual),
        )
        self.slot += 1
        return outcome


def pricing_step(policy: PricingPolicy, obs: SlotObservation) -> Tuple[PricingPolicy, SlotOutcome]:
    """Functional form of ``PricingPolicy.step``."""
    outcome = policy.step(obs)
    return policy, outcome
