"""Characteristic classes of Lee-Szczarba manifolds and flat cube complexes."""

__version__ = "0.1.0"
