"""Exact tools for least k-th power non-residues in arithmetic progressions."""

__version__ = "0.1.0"
