"""Exact calculus of polyhedral superforms over the rationals."""

__version__ = "0.1.0"
