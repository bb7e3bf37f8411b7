"""Exact computations with cone lattices, Ceva configurations and Cevian operations."""

__version__ = "0.1.0"

from .errors import CevianError, InconsistencyError, ParseError, ValidationError  # noqa: E402
from .ratcore import INF, RatioSet, parse_ratioset  # noqa: E402

__all__ = ["CevianError", "InconsistencyError", "ParseError", "ValidationError", "INF", "RatioSet", "parse_ratioset"]
