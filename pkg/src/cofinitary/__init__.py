"""Forcing-style construction of a generic permutation over a cofinitary base group."""

__version__ = "0.1.0"
