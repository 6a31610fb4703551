"""Torific re-embeddings of plane curve singularities, computed exactly."""

__version__ = "0.1.0"
