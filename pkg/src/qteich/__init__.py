"""Exact quantum trace computations on triangulated punctured surfaces."""

__version__ = "0.1.0"
