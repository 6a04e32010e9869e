"""Exact large-N limits of permutation-orbifold vertex algebras."""

__version__ = "0.1.0"
