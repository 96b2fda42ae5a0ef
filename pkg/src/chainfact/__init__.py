"""Exact verification toolkit for graded matrix factorizations of chain polynomials."""

__version__ = "0.1.0"
