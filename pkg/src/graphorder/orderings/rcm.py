"""Reverse Cuthill-McKee ordering."""

from __future__ import annotations

import numpy as np
from numba import njit

from ..graph import Graph, Permutation, connected_components, symmetrize
from ..traversal import _pseudo_peripheral


@njit(cache=True)
def _cm_component(indptr, indices, start, deg, visited, out, pos):
    """Cuthill-McKee BFS from ``start``; children by ascending (degree, id)."""
    out[pos] = start
    visited[start] = True
    qh, qt = pos, pos + 1
    while qh < qt:
        v = out[qh]
        qh += 1
        first = qt
        for p in range(indptr[v], indptr[v + 1]):
            u = indices[p]
            if not visited[u]:
                visited[u] = True
                out[qt] = u
                qt += 1
        # insertion sort of the new children; neighbor lists are short
        for i in range(first + 1, qt):
            x = out[i]
            j = i - 1
            while j >= first and (deg[out[j]] > deg[x] or (deg[out[j]] == deg[x] and out[j] > x)):
                out[j + 1] = out[j]
                j -= 1
            out[j + 1] = x
    return qt


@njit(cache=True)
def _rcm(indptr, indices, comp_starts, deg):
    n = indptr.size - 1
    level = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    visited = np.zeros(n, dtype=np.bool_)
    out = np.empty(n, dtype=np.int64)
    pos = 0
    for c in range(comp_starts.size):
        s = _pseudo_peripheral(indptr, indices, comp_starts[c], level, queue, deg)
        end = _cm_component(indptr, indices, s, deg, visited, out, pos)
        out[pos:end] = out[pos:end][::-1].copy()
        pos = end
    return out


def component_seeds(graph: Graph) -> tuple[list[np.ndarray], np.ndarray]:
    """Components largest-first plus the min-degree (then min-id) vertex of each."""
    deg = graph.degrees()
    groups = connected_components(graph).groups()
    seeds = np.array([grp[np.lexsort((grp, deg[grp]))[0]] for grp in groups], dtype=np.int64)
    return groups, seeds


def rcm(graph: Graph) -> Permutation:
    """RCM per component, components largest-first, isolated vertices last."""
    g = symmetrize(graph)
    if g.n == 0:
        return Permutation.identity(0)
    deg = g.degrees()
    groups, seeds = component_seeds(g)
    # isolated vertices are singleton groups; they sort after larger ones by id
    order = _rcm(g.row_offsets, g.col_indices, seeds, deg)
    return Permutation.from_order(order)
