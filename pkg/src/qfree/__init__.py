"""Simulator and exact-analysis toolkit for a two-prover free-game
verification protocol over gap coloring instances."""

from .errors import CapExceededError, InputError, InternalInvariantError

__version__ = "0.1.0"

__all__ = [
    "CapExceededError",
    "InputError",
    "InternalInvariantError",
    "__version__",
]
