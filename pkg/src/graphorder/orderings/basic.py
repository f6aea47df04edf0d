"""Trivial orderings used as baselines."""

from __future__ import annotations

import numpy as np

from ..graph import Graph, Permutation, random_shuffle_permutation


def identity_order(graph: Graph) -> Permutation:
    return Permutation.identity(graph.n)


def reverse(perm: Permutation) -> Permutation:
    """Same sequence read back to front."""
    return Permutation.from_order(perm.inverse[::-1])


def random_order(graph: Graph, seed: int | None = 0) -> Permutation:
    if graph.n == 0:
        return Permutation.identity(0)
    return random_shuffle_permutation(graph.n, seed)
