"""Norms, integration operators and essential-norm diagnostics on the unit disk."""

__version__ = "0.1.0"
