"""Conformally covariant symmetry breaking operators on differential forms, flat model."""

__version__ = "0.1.0"
