"""Reduction of PDE operators with linear involutions, and Green's functions on the disk."""

__version__ = "0.1.0"
