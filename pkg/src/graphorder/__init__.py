"""Vertex ordering toolkit for graph compression and sparse-matrix locality."""
