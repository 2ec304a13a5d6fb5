"""Klingen Eisenstein series pullbacks, computed and checked numerically."""

__version__ = "0.1.0"
