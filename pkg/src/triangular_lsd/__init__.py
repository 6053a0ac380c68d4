"""Limiting spectral distributions of symmetric triangular patterned random matrices."""

__version__ = "0.1.0"
