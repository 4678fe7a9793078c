"""Allocation, pricing and baseline policies."""

from policies.allocator import AllocatorPolicy, actual_purchase, decide_purchase
from policies.greedy import GreedyPolicy, greedy_step
from policies.pricing import (
    DemandModel,
    LinearDemand,
    PricingDecision,
    PricingPolicy,
    RealizationMode,
    ScaledDemand,
    optimize_price,
    pricing_step,
    profit,
    realize_demand,
)

__all__ = [
    "AllocatorPolicy",
    "actual_purchase",
    "decide_purchase",
    "GreedyPolicy",
    "greedy_step",
    "DemandModel",
    "LinearDemand",
    "PricingDecision",
    "PricingPolicy",
    "RealizationMode",
    "ScaledDemand",
    "optimize_price",
    "pricing_step",
    "profit",
    "realize_demand",
]
