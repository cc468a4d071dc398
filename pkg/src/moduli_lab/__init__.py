"""Finite-dimensional laboratory for the moduli equations A*^s A^s = (A*A)^s."""
__version__ = "0.1.0"
