"""SlashBurn hub/spoke ordering.

Each round removes the ``k = ceil(hub_ratio * n_cur)`` highest-degree
vertices of the current giant component and gives them the lowest free
positions. The remaining graph falls apart into a new giant component and
spokes; the spokes take the highest free positions and the round repeats on
the giant until it has at most ``k`` vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from ..graph import Graph, Permutation, connected_components, induced_subgraph, symmetrize


@dataclass(frozen=True)
class SlashburnParams:
    hub_ratio: float = 0.005
    min_component: int = 64

    def __post_init__(self):
        if not 0 < self.hub_ratio <= 0.5:
            raise ValueError("hub_ratio must lie in (0, 0.5]")
        if self.min_component < 1:
            raise ValueError("min_component must be >= 1")


HUB_RATIO_SWEEP = (0.001, 0.005, 0.01, 0.02, 0.05)


@njit(cache=True)
def _live_degrees(indptr, indices, alive, verts):
    deg = np.zeros(verts.size, dtype=np.int64)
    for i in range(verts.size):
        v = verts[i]
        c = 0
        for p in range(indptr[v], indptr[v + 1]):
            if alive[indices[p]]:
                c += 1
        deg[i] = c
    return deg


@njit(cache=True)
def _live_components(indptr, indices, alive, verts, comp, queue):
    """Label live vertices of ``verts`` by BFS; returns labels aligned with verts.

    Labels are numbered in order of their first vertex in ``verts``.
    """
    for i in range(verts.size):
        comp[verts[i]] = -1
    lab = np.empty(verts.size, dtype=np.int64)
    nc = 0
    for i in range(verts.size):
        s = verts[i]
        if not alive[s] or comp[s] >= 0:
            continue
        comp[s] = nc
        queue[0] = s
        qh, qt = 0, 1
        while qh < qt:
            v = queue[qh]
            qh += 1
            for p in range(indptr[v], indptr[v + 1]):
                u = indices[p]
                if alive[u] and comp[u] < 0:
                    comp[u] = nc
                    queue[qt] = u
                    qt += 1
        nc += 1
    for i in range(verts.size):
        lab[i] = comp[verts[i]] if alive[verts[i]] else -1
    return lab, nc


def _by_degree(deg: np.ndarray, verts: np.ndarray) -> np.ndarray:
    return verts[np.lexsort((verts, -deg))]


def _spokes(g: Graph, verts: np.ndarray, lab: np.ndarray, giant: int, params: SlashburnParams) -> np.ndarray:
    """Non-giant components by ascending size (ties by first vertex).

    Inside a component: recursive SlashBurn above ``min_component`` vertices,
    otherwise degree descending.
    """
    keep = (lab >= 0) & (lab != giant)
    verts, lab = verts[keep], lab[keep]
    if not verts.size:
        return verts
    sizes = np.bincount(lab)
    present = np.flatnonzero(sizes)
    rank_of = np.empty(sizes.size, dtype=np.int64)
    rank_of[present[np.lexsort((present, sizes[present]))]] = np.arange(present.size)
    rank = rank_of[lab]
    within = np.empty(verts.size, dtype=np.int64)
    small = sizes[lab] <= params.min_component
    if small.any():
        sub, ids = induced_subgraph(g, verts[small])
        key = -sub.degrees()
        within[small] = np.argsort(np.lexsort((ids, key)))
    for c in np.unique(lab[~small]):
        mask = lab == c
        sub, ids = induced_subgraph(g, verts[mask])
        pos = np.empty(sub.n, dtype=np.int64)
        pos[_slashburn_connected(sub, params)] = np.arange(sub.n)
        within[mask] = pos
    return verts[np.lexsort((within, rank))]


def _slashburn_connected(g: Graph, params: SlashburnParams) -> np.ndarray:
    """Order (local ids) of a connected graph."""
    n = g.n
    if n <= params.min_component:
        return _by_degree(g.degrees(), np.arange(n, dtype=np.int64))
    indptr, indices = g.row_offsets, g.col_indices
    alive = np.ones(n, dtype=np.bool_)
    comp = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    front, back = [], []
    giant = np.arange(n, dtype=np.int64)
    while True:
        k = max(1, math.ceil(params.hub_ratio * giant.size))
        deg = _live_degrees(indptr, indices, alive, giant)
        if giant.size <= k:
            front.append(_by_degree(deg, giant))
            break
        hubs = _by_degree(deg, giant)[:k]
        front.append(hubs)
        alive[hubs] = False
        lab, nc = _live_components(indptr, indices, alive, giant, comp, queue)
        if nc == 0:
            break
        sizes = np.bincount(lab[lab >= 0], minlength=nc)
        gl = int(np.argmax(sizes))
        back.append(_spokes(g, giant, lab, gl, params))
        # spokes are cut off from the giant, so they never count as live
        # neighbors again
        giant = giant[lab == gl]
    return np.concatenate(front + back[::-1])


def slashburn_order(graph: Graph, params: SlashburnParams | None = None) -> np.ndarray:
    params = params or SlashburnParams()
    g = symmetrize(graph)
    if g.n == 0:
        return np.zeros(0, dtype=np.int64)
    out = []
    for grp in connected_components(g).groups():
        if grp.size == 1:
            out.append(grp)
            continue
        sub, ids = induced_subgraph(g, grp)
        out.append(ids[_slashburn_connected(sub, params)])
    return np.concatenate(out)


def slashburn(graph: Graph, params: SlashburnParams | None = None) -> Permutation:
    """Hubs front, spokes back; components largest-first."""
    return Permutation.from_order(slashburn_order(graph, params))
