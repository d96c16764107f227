"""Exact tools for chi-boundedness: invariants, induced-subgraph detection,
certificate extraction, skeletons in sparse graphs, and corpus scans."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapabilityError,
    Graph6Error,
    HypothesisUnmetError,
    InternalInvariantError,
    ParameterError,
    RamseyChiError,
    SparsenessViolation,
)
from .graph import Graph, generate, parse_family  # noqa: E402
from .graph6 import parse_graph6, write_graph6  # noqa: E402

__all__ = [
    "CapabilityError",
    "Graph",
    "Graph6Error",
    "HypothesisUnmetError",
    "InternalInvariantError",
    "ParameterError",
    "RamseyChiError",
    "SparsenessViolation",
    "generate",
    "parse_family",
    "parse_graph6",
    "write_graph6",
]
