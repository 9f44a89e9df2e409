"""Finite iteration trees: construction, normalization, supports and tree embeddings."""

__version__ = "0.1.0"
