"""Recursive Fiedler partitioning with Pareto splits (viFPS).

At every level a small set of high-degree vertices holding a large share of
the volume is peeled off (the minority) and laid out after everything else;
the rest is bisected at the median of its Fiedler vector and each side is
ordered recursively. Pieces of at most ``n_base`` vertices are ordered by
AMD.

Orientation is kept consistent down the recursion: a child's Fiedler vector
is signed to agree with the parent's vector restricted to the child, and a
leaf's AMD order is reversed when it runs against that restricted vector.
Without this, neighboring leaves of a long band would meet end to end at
random and every seam would cost several bits per link.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, Permutation, bipartite_embed, connected_components, induced_subgraph, symmetrize
from .orderings.amd import amd_order
from .spectral import SolverConfig, fiedler_vector, median_split


def _default_solver() -> SolverConfig:
    # cuts only need the coarse shape of the vector
    return SolverConfig(tol=1e-3, max_iters=30, dense_max=128)


@dataclass(frozen=True)
class ParetoParams:
    rvol: float = 20.0
    rminor: float = 4.0
    n_base: int = 64
    solver: SolverConfig = field(default_factory=_default_solver)
    max_depth: int = 64
    minority_placement: str = "back"

    def __post_init__(self):
        if not 0 < self.rvol <= 100:
            raise ValueError("rvol must lie in (0, 100]")
        if not 0 < self.rminor <= 100:
            raise ValueError("rminor must lie in (0, 100]")
        if self.n_base < 2:
            raise ValueError("n_base must be >= 2")
        if self.minority_placement not in ("front", "back"):
            raise ValueError("minority_placement must be 'front' or 'back'")


def pareto_split(graph: Graph, rvol: float = 20.0, rminor: float = 4.0):
    """(minority, majority) vertex arrays, or None when no split applies.

    The minority is the shortest degree-descending prefix holding ``rvol``
    percent of the volume, widened to every vertex tied with its last
    degree; it is accepted when it has at most ``rminor`` percent of the
    vertices.
    """
    n = graph.n
    if graph.nnz == 0:
        return None
    deg = graph.degrees()
    order = np.lexsort((np.arange(n), -deg))
    cum = np.cumsum(deg[order])
    k = int(np.searchsorted(cum, rvol / 100.0 * cum[-1], side="left")) + 1
    k = int(np.count_nonzero(deg >= deg[order[min(k, n) - 1]]))
    if k >= n or k > rminor / 100.0 * n:
        return None
    return np.sort(order[:k]), np.sort(order[k:])


def _oriented(order: np.ndarray, ref) -> np.ndarray:
    """Reverse ``order`` (local ids) if it runs against ``ref``."""
    if ref is None or order.size < 2:
        return order
    r = ref[order]
    pos = np.arange(order.size, dtype=np.float64)
    if np.dot(pos - pos.mean(), r - r.mean()) < 0:
        return order[::-1]
    return order


def _components(g: Graph, n_base: int):
    """(large components, small non-trivial vertices, singletons), largest-first."""
    lab = connected_components(g)
    sizes = lab.component_sizes
    order = np.argsort(lab.labels, kind="stable")
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    n_big = int(np.count_nonzero(sizes > n_base))
    n_multi = int(np.count_nonzero(sizes > 1))
    big = [order[bounds[c]:bounds[c + 1]] for c in range(n_big)]
    small = order[bounds[n_big]:bounds[n_multi]]
    single = order[bounds[n_multi]:]
    return big, small, single


class _Runner:
    def __init__(self, params: ParetoParams):
        self.p = params
        self.fallbacks = 0
        self.unconverged = 0

    def leaf(self, g: Graph, ref) -> np.ndarray:
        return _oriented(amd_order(g), ref)

    def any(self, g: Graph, ref, depth: int) -> np.ndarray:
        """Order a possibly disconnected graph: components largest-first."""
        if g.n <= self.p.n_base or g.nnz == 0:
            return self.leaf(g, ref)
        return self.by_components(g, ref, depth, self.connected)

    def by_components(self, g: Graph, ref, depth: int, handle) -> np.ndarray:
        """Apply ``handle`` to each large component; batch the small ones.

        Components above ``n_base`` come first (largest-first), then all
        smaller non-trivial components in one AMD call (which keeps them
        largest-first), then isolated vertices by id.
        """
        big, small, single = _components(g, self.p.n_base)
        if not small.size and not single.size and len(big) == 1:
            return handle(g, ref, depth)
        out = []
        for grp in big:
            sub, ids = induced_subgraph(g, grp)
            out.append(ids[handle(sub, None if ref is None else ref[ids], depth)])
        if small.size:
            sub, ids = induced_subgraph(g, small)
            out.append(ids[amd_order(sub)])
        out.append(single)
        return np.concatenate(out)

    def connected(self, g: Graph, ref, depth: int) -> np.ndarray:
        p = self.p
        if g.n <= p.n_base or depth >= p.max_depth:
            return self.leaf(g, ref)
        split = pareto_split(g, p.rvol, p.rminor)
        if split is None:
            return self.cut(g, ref, depth)
        minority, majority = split
        sub, ids = induced_subgraph(g, majority)
        sref = None if ref is None else ref[ids]
        major = ids[self.by_components(sub, sref, depth, self.cut_or_leaf)]
        minor = minority[self.minority_order(g, minority)]
        if p.minority_placement == "back":
            return np.concatenate([major, minor])
        return np.concatenate([minor, major])

    def cut_or_leaf(self, g: Graph, ref, depth: int) -> np.ndarray:
        if g.n <= self.p.n_base:
            return self.leaf(g, ref)
        return self.cut(g, ref, depth)

    def minority_order(self, g: Graph, minority: np.ndarray) -> np.ndarray:
        sub, _ = induced_subgraph(g, minority)
        sdeg = sub.degrees()
        iso = np.flatnonzero(sdeg == 0)
        gdeg = g.degrees()[minority]
        iso = iso[np.lexsort((iso, -gdeg[iso]))]
        if iso.size == sub.n:
            return iso
        rest = amd_order(sub)
        rest = rest[sdeg[rest] > 0]
        return np.concatenate([iso, rest])

    def cut(self, g: Graph, ref, depth: int) -> np.ndarray:
        res = fiedler_vector(g, self.p.solver)
        if res.degenerate:
            self.fallbacks += 1
            return self.leaf(g, ref)
        if not res.converged:
            self.unconverged += 1
        f = res.vector
        if ref is not None and np.dot(f, ref - ref.mean()) < 0:
            f = -f
        elif ref is None and f[np.flatnonzero(f)[0]] > 0:
            f = -f
        a, b = median_split(f)
        out = []
        for side in (a, b):
            sub, ids = induced_subgraph(g, side)
            out.append(ids[self.any(sub, f[ids], depth + 1)])
        return np.concatenate(out)


def vifps_order(graph: Graph, params: ParetoParams | None = None, stats: dict | None = None) -> np.ndarray:
    g = symmetrize(graph)
    if g.n == 0:
        return np.zeros(0, dtype=np.int64)
    run = _Runner(params or ParetoParams())
    order = run.any(g, None, 0)
    if stats is not None:
        stats.update(unconverged=run.unconverged, degenerate=run.fallbacks)
    return order


def vifps(graph: Graph, params: ParetoParams | None = None, stats: dict | None = None) -> Permutation:
    """viFPS ordering; the input is symmetrized, components go largest-first."""
    return Permutation.from_order(vifps_order(graph, params, stats))


def vifps_directed(graph: Graph, params: ParetoParams | None = None,
                   stats: dict | None = None) -> tuple[Permutation, Permutation]:
    """Row and column permutations from the bipartite embedding [[0, A], [A^T, 0]].

    The embedded order is projected onto row vertices (ids < n) and column
    vertices (ids >= n), keeping relative order.
    """
    n = graph.n
    order = vifps_order(bipartite_embed(graph), params, stats)
    rows = order[order < n]
    cols = order[order >= n] - n
    return Permutation.from_order(rows), Permutation.from_order(cols)
