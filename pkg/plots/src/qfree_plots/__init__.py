"""Figure rendering for qfree experiment CSVs."""

__version__ = "0.1.0"
