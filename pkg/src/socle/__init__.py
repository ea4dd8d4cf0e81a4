"""Exact commutative-algebra engine for socle modules, reductions, and perfect matrices."""

__version__ = "0.1.0"
