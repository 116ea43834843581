"""Numerical checks that Haar-random symplectic states form state t-designs."""

__version__ = "0.1.0"
