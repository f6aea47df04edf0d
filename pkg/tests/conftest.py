import gzip
import math
from pathlib import Path

import numpy as np
import pytest

from graphorder.graph import Graph, Permutation

DATA = Path(__file__).parent / "data"


def brute_scores(graph: Graph, perm: Permutation) -> tuple[float, float]:
    """(mLogA, mLogGapA) by explicit per-row sorting and plain float sums."""
    fwd = perm.forward.tolist()
    total_a = 0.0
    total_gap = 0.0
    m = 0
    for v in range(graph.n):
        nbrs = graph.neighbors(v).tolist()
        m += len(nbrs)
        for u in nbrs:
            total_a += math.log2(1 + abs(fwd[u] - fwd[v]))
        pos = sorted(fwd[u] for u in nbrs)
        if pos:
            total_gap += 1.0
            for prev, cur in zip(pos, pos[1:]):
                total_gap += math.log2(1 + cur - prev)
    return total_a / m, total_gap / m


def graph_from_g6(line: bytes) -> Graph:
    import networkx as nx

    g = nx.from_graph6_bytes(line)
    edges = np.array(list(g.edges()), dtype=np.int64).reshape(-1, 2)
    return Graph.from_edges(g.number_of_nodes(), edges[:, 0], edges[:, 1], symmetrize=True)


def small_connected(n: int) -> list[bytes]:
    path = DATA / f"connected_n{n}.g6.gz"
    if not path.exists():
        pytest.skip(f"{path.name} not generated (scripts/gen_small_graphs.py)")
    with gzip.open(path, "rb") as fh:
        return [ln for ln in fh.read().splitlines() if ln]


def random_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return Graph.from_edges(n, iu[keep], ju[keep], symmetrize=True)


def path_graph(n: int) -> Graph:
    a = np.arange(n - 1)
    return Graph.from_edges(n, a, a + 1, symmetrize=True)


def is_bijection(perm: Permutation, n: int) -> bool:
    return perm.n == n and np.array_equal(np.sort(perm.forward), np.arange(n))


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[criterion] = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, detail


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
