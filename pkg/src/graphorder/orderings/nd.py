"""Nested dissection with spectral bisection (a stand-in for METIS ND).

A median Fiedler cut gives an edge separator; a greedy cover of the cut
edges turns it into a vertex separator. Both sides are ordered
recursively, the separator goes last, and pieces of at most ``n_base``
vertices are ordered by AMD.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ..graph import Graph, Permutation, connected_components, induced_subgraph, symmetrize
from ..spectral import SolverConfig, fiedler_vector, median_split
from .amd import amd_order


def _default_solver() -> SolverConfig:
    return SolverConfig(tol=1e-3, max_iters=30, dense_max=128)


@dataclass(frozen=True)
class NdParams:
    n_base: int = 64
    solver: SolverConfig = field(default_factory=_default_solver)
    max_depth: int = 64

    def __post_init__(self):
        if self.n_base < 2:
            raise ValueError("n_base must be >= 2")


@njit(cache=True)
def _cut_degrees(indptr, indices, side):
    n = indptr.size - 1
    cnt = np.zeros(n, dtype=np.int64)
    for v in range(n):
        for p in range(indptr[v], indptr[v + 1]):
            if side[indices[p]] != side[v]:
                cnt[v] += 1
    return cnt


def vertex_separator(g: Graph, side: np.ndarray) -> np.ndarray:
    """Greedy cover of the edges crossing ``side`` (a 0/1 array).

    Repeatedly takes the vertex covering the most uncovered cut edges; ties
    go to the vertex in the smaller side, then to the smaller id.
    """
    side = np.asarray(side, dtype=np.int64)
    indptr, indices = g.row_offsets, g.col_indices
    cnt = _cut_degrees(indptr, indices, side)
    n_side = np.bincount(side, minlength=2)
    small = 0 if n_side[0] <= n_side[1] else 1
    heap = [(-int(cnt[v]), int(side[v] != small), int(v)) for v in np.flatnonzero(cnt)]
    heapq.heapify(heap)
    taken = np.zeros(g.n, dtype=np.bool_)
    sep = []
    while heap:
        c, flag, v = heapq.heappop(heap)
        if taken[v] or cnt[v] == 0:
            continue
        if -c != cnt[v]:
            heapq.heappush(heap, (-int(cnt[v]), flag, v))
            continue
        taken[v] = True
        sep.append(v)
        cnt[v] = 0
        for u in indices[indptr[v]:indptr[v + 1]]:
            if side[u] != side[v] and not taken[u] and cnt[u] > 0:
                cnt[u] -= 1
    return np.array(sorted(sep), dtype=np.int64)


class _Dissector:
    def __init__(self, params: NdParams):
        self.p = params
        self.fallbacks = 0
        self.unconverged = 0

    def any(self, g: Graph, depth: int) -> np.ndarray:
        if g.n <= self.p.n_base or g.nnz == 0:
            return amd_order(g)
        lab = connected_components(g)
        if lab.component_count == 1:
            return self.connected(g, depth)
        out = []
        small = []
        single = []
        for grp in lab.groups():
            if grp.size > self.p.n_base:
                sub, ids = induced_subgraph(g, grp)
                out.append(ids[self.connected(sub, depth)])
            elif grp.size > 1:
                small.append(grp)
            else:
                single.append(grp)
        if small:
            # small components share one AMD call, which keeps them largest-first
            sub, ids = induced_subgraph(g, np.sort(np.concatenate(small)))
            out.append(ids[amd_order(sub)])
        out.extend(single)
        return np.concatenate(out)

    def connected(self, g: Graph, depth: int) -> np.ndarray:
        if g.n <= self.p.n_base or depth >= self.p.max_depth:
            return amd_order(g)
        res = fiedler_vector(g, self.p.solver)
        if res.degenerate:
            self.fallbacks += 1
            return amd_order(g)
        if not res.converged:
            self.unconverged += 1
        f = res.vector
        if f[np.flatnonzero(f)[0]] > 0:
            f = -f
        a, _ = median_split(f)
        side = np.ones(g.n, dtype=np.int64)
        side[a] = 0
        sep = vertex_separator(g, side)
        insep = np.zeros(g.n, dtype=np.bool_)
        insep[sep] = True
        out = []
        for s in (0, 1):
            part = np.flatnonzero((side == s) & ~insep)
            if part.size:
                sub, ids = induced_subgraph(g, part)
                out.append(ids[self.any(sub, depth + 1)])
        if sep.size:
            sub, ids = induced_subgraph(g, sep)
            out.append(ids[amd_order(sub)])
        return np.concatenate(out)


def nested_dissection_order(graph: Graph, params: NdParams | None = None, stats: dict | None = None) -> np.ndarray:
    g = symmetrize(graph)
    if g.n == 0:
        return np.zeros(0, dtype=np.int64)
    run = _Dissector(params or NdParams())
    order = run.any(g, 0)
    if stats is not None:
        stats.update(unconverged=run.unconverged, degenerate=run.fallbacks)
    return order


def nested_dissection(graph: Graph, params: NdParams | None = None, stats: dict | None = None) -> Permutation:
    """Spectral nested dissection; components largest-first."""
    return Permutation.from_order(nested_dissection_order(graph, params, stats))
