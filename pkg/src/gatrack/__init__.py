"""Geometric-algebra rigid-body simulation and cascaded tracking control."""

__version__ = "0.1.0"
