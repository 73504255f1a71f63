"""Shape-invariant superpotentials with translated parameters and translation invariants."""

__version__ = "0.1.0"
