"""Exact computations in partition algebras and their 2-tonal subalgebras."""

__version__ = "0.1.0"
