"""Numerical laboratory for ratios of harmonic functions with a common zero set."""

__version__ = "0.1.0"
