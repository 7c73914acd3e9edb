"""Exact and numeric machinery for quantum circle bundles over quantum projective spaces."""

__version__ = "0.1.0"
