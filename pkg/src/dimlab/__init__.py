"""Exact computations on finite real-valued hypothesis classes."""

__version__ = "0.1.0"
