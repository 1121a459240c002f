"""Topological entropy of upper semi-continuous set-valued functions.

Finite relations are handled exactly; set-valued functions on [0, 1] with
piecewise-linear graphs are discretized onto grids first.
"""

from .core import (FiniteRelation, MetricPointSet, NotSurjectiveError, SpaceMismatchError,
                   compose, evaluate, inverse, iterate, surjective_core)
from .entropy import (estimate_entropy, estimate_entropy_restricted, run_detectors,
                      sft_entropy)
from .interval import IntervalSVF, PLHomeomorphism, discretize, from_pieces
from .io import SystemSpec, parse_spec, write_spec

__version__ = "0.1.0"

__all__ = [
    "FiniteRelation", "IntervalSVF", "MetricPointSet", "NotSurjectiveError", "PLHomeomorphism",
    "SpaceMismatchError", "SystemSpec", "compose", "discretize", "estimate_entropy",
    "estimate_entropy_restricted", "evaluate", "from_pieces", "inverse", "iterate",
    "parse_spec", "run_detectors", "sft_entropy", "surjective_core", "write_spec",
]
