"""Numerical toolkit for analytic Morrey spaces and integration operators."""
__version__ = "0.1.0"
