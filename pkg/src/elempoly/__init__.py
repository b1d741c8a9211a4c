"""Symbolic calculus for elementary polyhedra and special generic maps."""

__version__ = "0.1.0"
