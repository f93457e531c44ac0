"""Exact computation with trees over ordered abelian groups."""

__version__ = "0.1.0"
