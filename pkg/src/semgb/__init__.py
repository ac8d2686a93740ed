"""Identifiability of linear structural equation models via Gröbner bases."""

__version__ = "0.1.0"
