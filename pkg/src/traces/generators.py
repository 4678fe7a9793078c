"""
Synthetic trace generators.

Every generator is fully determined by its spec (seed included): the same
(spec, length) pair always produces a bit-identical trace.
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from core.models import SlotObservation
from traces.models import GeneratorKind, GeneratorSpec, Trace, TraceMeta

logger = logging.getLogger(__name__)


def validate_spec(spec: GeneratorSpec) -> GeneratorSpec:
    """Reject specs whose values could leave their declared bounds."""
    numbers = {
        "a_max": spec.a_max,
        "s_low": spec.s_low,
        "s_high": spec.s_high,
        "gamma_low": spec.gamma_low,
        "gamma_high": spec.gamma_high,
        "base_price": spec.base_price,
        "spike_price": spec.spike_price,
        "y_low": spec.y_low,
        "y_high": spec.y_high,
        "constant_s": spec.constant_s,
        "constant_a": spec.constant_a,
        "constant_gamma": spec.constant_gamma,
    }
    for name, value in numbers.items():
        if not math.isfinite(value) or value < 0:
            raise ValueError(f"{name} must be finite and non-negative (got {value})")
    if spec.s_low > spec.s_high:
        raise ValueError("s_low must not exceed s_high")
    if spec.gamma_low > spec.gamma_high:
        raise ValueError("gamma_low must not exceed gamma_high")
    for name in ("spike_prob", "p_high_to_low", "p_low_to_high"):
        value = getattr(spec, name)
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1] (got {value})")
    if spec.kind is GeneratorKind.PRICE_SPIKE and spec.spike_price < spec.base_price:
        raise ValueError("spike_price must be at least base_price")
    return spec


def _meta(spec: GeneratorSpec) -> TraceMeta:
    return TraceMeta(
        source=f"generator:{spec.kind.value}",
        seed=spec.seed,
        generator=spec.to_dict(),
        s_max=spec.s_max,
        a_max=spec.declared_a_max,
        gamma_max=spec.gamma_max,
    )


def _uniform_demand(rng: np.random.Generator, spec: GeneratorSpec, length: int) -> np.ndarray:
    if spec.integer_demand:
        return rng.integers(0, int(math.floor(spec.a_max)) + 1, size=length).astype(float)
    return rng.uniform(0.0, spec.a_max, size=length)


def _build(spec: GeneratorSpec, s: np.ndarray, a: np.ndarray, gamma: np.ndarray,
           y: Optional[np.ndarray]) -> Trace:
    if y is None:
        slots = [SlotObservation(s=float(si), a=float(ai), gamma=float(gi))
                 for si, ai, gi in zip(s, a, gamma)]
    else:
        slots = [SlotObservation(s=float(si), a=float(ai), gamma=float(gi), y=float(yi))
                 for si, ai, gi, yi in zip(s, a, gamma, y)]
    return Trace(slots=slots, meta=_meta(spec))


def _constant_y(spec: GeneratorSpec, length: int) -> Optional[np.ndarray]:
    if not spec.demand_state:
        return None
    return np.full(length, spec.y_high)


def gen_iid(spec: GeneratorSpec, length: int) -> Trace:
    """i.i.d. slots: integer-uniform demand, uniform supply and price."""
    validate_spec(spec)
    rng = np.random.default_rng(spec.seed)
    a = _uniform_demand(rng, spec, length)
    s = rng.uniform(spec.s_low, spec.s_high, size=length)
    gamma = rng.uniform(spec.gamma_low, spec.gamma_high, size=length)
    return _build(spec, s, a, gamma, _constant_y(spec, length))


def gen_price_spike(spec: GeneratorSpec, length: int) -> Trace:
    """Low baseline price with seeded random spikes to ``spike_price``."""
    validate_spec(spec)
    rng = np.random.default_rng(spec.seed)
    a = _uniform_demand(rng, spec, length)
    s = rng.uniform(spec.s_low, spec.s_high, size=length)
    spikes = rng.random(length) < spec.spike_prob
    gamma = np.where(spikes, spec.spike_price, spec.base_price)
    return _build(spec, s, a, gamma, _constant_y(spec, length))


def _two_state_chain(rng: np.random.Generator, length: int, p_high_to_low: float,
                     p_low_to_high: float) -> np.ndarray:
    """Boolean HIGH(True)/LOW(False) sample path starting in HIGH."""
    draws = rng.random(length)
    states = np.empty(length, dtype=bool)
    high = True
    for t in range(length):
        states[t] = high
        if high and draws[t] < p_high_to_low:
            high = False
        elif not high and draws[t] < p_low_to_high:
            high = True
    return states


def _split_range(low: float, high: float) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    middle = 0.5 * (low + high)
    return (low, middle), (middle, high)


def gen_markov(spec: GeneratorSpec, length: int) -> Trace:
    """Each process switches between a HIGH and a LOW regime.

    In HIGH a value is drawn from the upper half of its range, in LOW
    from the lower half. The demand regime also sets the demand state y.
    """
    validate_spec(spec)
    rng = np.random.default_rng(spec.seed)
    chains = [
        _two_state_chain(rng, length, spec.p_high_to_low, spec.p_low_to_high)
        for _ in range(3)
    ]
    demand_high, supply_high, price_high = chains

    (a_lo, a_mid), (_, a_hi) = _split_range(0.0, spec.a_max)
    if spec.integer_demand:
        top = int(math.floor(spec.a_max))
        mid = top // 2
        a = np.where(
            demand_high,
            rng.integers(mid, top + 1, size=length),
            rng.integers(0, mid + 1, size=length),
        ).astype(float)
    else:
        a = np.where(demand_high, rng.uniform(a_mid, a_hi, size=length),
                     rng.uniform(a_lo, a_mid, size=length))

    (s_lo, s_mid), (_, s_hi) = _split_range(spec.s_low, spec.s_high)
    s = np.where(supply_high, rng.uniform(s_mid, s_hi, size=length),
                 rng.uniform(s_lo, s_mid, size=length))

    (g_lo, g_mid), (_, g_hi) = _split_range(spec.gamma_low, spec.gamma_high)
    gamma = np.where(price_high, rng.uniform(g_mid, g_hi, size=length),
                     rng.uniform(g_lo, g_mid, size=length))

    y = None
    if spec.demand_state:
        y = np.where(demand_high, spec.y_high, spec.y_low)
    return _build(spec, s, a, gamma, y)


def gen_constant(spec: GeneratorSpec, length: int) -> Trace:
    """Every slot identical."""
    validate_spec(spec)
    s = np.full(length, spec.constant_s)
    a = np.full(length, spec.constant_a)
    gamma = np.full(length, spec.constant_gamma)
    y = None
    if spec.constant_y is not None:
        y = np.full(length, spec.constant_y)
    elif spec.demand_state:
        y = np.full(length, spec.y_high)
    return _build(spec, s, a, gamma, y)


GENERATORS = {
    GeneratorKind.IID_UNIFORM: gen_iid,
    GeneratorKind.MARKOV: gen_markov,
    GeneratorKind.PRICE_SPIKE: gen_price_spike,
    GeneratorKind.CONSTANT: gen_constant,
}


def generate(spec: GeneratorSpec, length: int) -> Trace:
    """Dispatch to the generator named by ``spec.kind``."""
    if length < 0:
        raise ValueError("length must be non-negative")
    trace = GENERATORS[spec.kind](spec, length)
    logger.debug(f"Generated {length} slots ({spec.kind.value}, seed={spec.seed})")
    return trace
