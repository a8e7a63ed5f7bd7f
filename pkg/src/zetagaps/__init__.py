"""Zeta zeros, pair statistics and small-gap diagnostics."""

__version__ = "0.1.0"
