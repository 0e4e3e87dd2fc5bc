"""Zombies and Survivors on the n x n torus.

Exact single-zombie capture fields, projection bounds, a seeded game
simulator and searches over survivor strategies.
"""
from ._backend import BACKEND
from .dp import ProbField, WeightSummary, capture_field, weight
from .strategy import Strategy, builtin, builtin_from_spec, horizon, parse_strategy, format_strategy

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ProbField",
    "Strategy",
    "WeightSummary",
    "builtin",
    "builtin_from_spec",
    "capture_field",
    "format_strategy",
    "horizon",
    "parse_strategy",
    "weight",
]
