"""Verification of 2-class group structure in the cyclotomic Z2-tower of Q(sqrt(pqr))."""

__version__ = "0.1.0"
