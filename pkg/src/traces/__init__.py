"""Trace ingestion and synthetic generation."""

from traces.generators import (
    gen_constant,
    gen_iid,
    gen_markov,
    gen_price_spike,
    generate,
    validate_spec,
)
from traces.models import GeneratorKind, GeneratorSpec, Trace, TraceMeta
from traces.trace_io import load_csv, write_csv

__all__ = [
    "gen_constant",
    "gen_iid",
    "gen_markov",
    "gen_price_spike",
    "generate",
    "validate_spec",
    "GeneratorKind",
    "GeneratorSpec",
    "Trace",
    "TraceMeta",
    "load_csv",
    "write_csv",
]
