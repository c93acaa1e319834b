"""Numerical Dirichlet-to-Neumann map for the NLS equation on the half-line."""

__version__ = "0.1.0"
