"""Exact Chevalley group computations over integer polynomials and finite rings."""

__version__ = "0.1.0"
