"""fcut1: vertices sorted by their Fiedler-vector entry."""

from __future__ import annotations

import numpy as np

from ..graph import Graph, Permutation, connected_components, induced_subgraph, symmetrize
from ..spectral import SolverConfig, fiedler_vector, order_from_result


def fcut1(graph: Graph, config: SolverConfig | None = None, stats: dict | None = None) -> Permutation:
    """Fiedler order per connected component, components largest-first.

    Isolated vertices come last by id (they are singleton components).
    ``stats``, if given, receives solver counters.
    """
    unconverged = degenerate = 0
    g = symmetrize(graph)
    if g.n == 0:
        return Permutation.identity(0)
    out = []
    for grp in connected_components(g).groups():
        if grp.size < 2:
            out.append(grp)
            continue
        sub, ids = induced_subgraph(g, grp)
        res = fiedler_vector(sub, config)
        unconverged += not res.converged
        degenerate += res.degenerate
        out.append(ids[order_from_result(sub, res).inverse])
    if stats is not None:
        stats.update(unconverged=unconverged, degenerate=degenerate)
    return Permutation.from_order(np.concatenate(out))
