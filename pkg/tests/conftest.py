#!/usr/bin/env python3
"""
Shared fixtures for the simulator test suite.
"""

import sys
from pathlib import Path

import pytest

# Add project src to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT / 'src'))

from core.models import Params, SlotObservation  # noqa: E402
from traces.models import GeneratorKind, GeneratorSpec, Trace  # noqa: E402


@pytest.fixture
def experiment_params() -> Params:
    """Experiment constants: V=100, epsilon=a_max/2, x_max=400."""
    return Params(V=100.0, epsilon=87.5, x_max=400.0, a_max=175.0, s_max=90.0,
                  gamma_max=180.0, p_max=200.0)


@pytest.fixture
def small_params() -> Params:
    return Params(V=1.0, epsilon=1.0, x_max=5.0, a_max=5.0, s_max=0.0, gamma_max=9.0)


def make_trace(s, a, gamma, y=None) -> Trace:
    """Inline trace from equal-length columns."""
    if y is None:
        y = [None] * len(s)
    return Trace(slots=[SlotObservation(s=si, a=ai, gamma=gi, y=yi) for si, ai, gi, yi in zip(s, a, gamma, y)])


def experiment_spec(kind: GeneratorKind, seed: int) -> GeneratorSpec:
    return GeneratorSpec(kind=kind, seed=seed, a_max=175.0, s_high=90.0, gamma_high=180.0, spike_price=180.0)
