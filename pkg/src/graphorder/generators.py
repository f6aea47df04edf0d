"""Deterministic constructors for the elementary and synthetic test graphs.

Every generator returns a symmetric :class:`Graph` labeled in its natural
("compact") ordering, so the identity permutation is the reference layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph

KINDS = ("conv1", "pok", "biclique", "wheel", "ws", "binomial")


def _band_edges(lo: int, hi: int, b: int) -> tuple[np.ndarray, np.ndarray]:
    """Edges (u, u + k), 1 <= k <= b, of the non-circulant band on [lo, hi)."""
    src, dst = [], []
    for k in range(1, b + 1):
        u = np.arange(lo, hi - k, dtype=np.int64)
        src.append(u)
        dst.append(u + k)
    if not src:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return np.concatenate(src), np.concatenate(dst)


def gen_conv1(n: int, b: int) -> Graph:
    """1-D convolution graph: u ~ v iff 0 < |u - v| <= b (not circulant)."""
    if not 1 <= b < n:
        raise ValueError(f"need 1 <= b < n, got b={b}, n={n}")
    src, dst = _band_edges(0, n, b)
    return Graph.from_edges(n, src, dst, symmetrize=True)


def gen_pok(n: int, d_avg: int) -> Graph:
    """Path of cliques K_c, c = d_avg, joined by one bridge per consecutive pair.

    The bridge links the last vertex of clique i to the first vertex of
    clique i + 1. A trailing partial clique absorbs the remainder of n.
    """
    c = int(d_avg)
    if c < 2:
        raise ValueError("clique size d_avg must be >= 2")
    if n < 2:
        raise ValueError("n must be >= 2")
    starts = np.arange(0, n, c, dtype=np.int64)
    src, dst = [], []
    for i in range(c):
        for j in range(i + 1, c):
            u = starts + i
            v = starts + j
            ok = v < n
            src.append(u[ok])
            dst.append(v[ok])
    bridge = starts[1:]
    src.append(bridge - 1)
    dst.append(bridge)
    return Graph.from_edges(n, np.concatenate(src), np.concatenate(dst), symmetrize=True)


def biclique_edges(n: int, b: int) -> tuple[np.ndarray, np.ndarray]:
    """Complete K(b, n - b) with centers 0..b-1 listed center by center."""
    centers = np.repeat(np.arange(b, dtype=np.int64), n - b)
    periph = np.tile(np.arange(b, n, dtype=np.int64), b)
    return centers, periph


def gen_biclique(n: int, d_avg: float) -> Graph:
    """Biclique K(b, n - b), b = ceil(d_avg / 2), trimmed toward nnz ~ d_avg * n.

    When the target exceeds the complete biclique it is clamped to complete;
    otherwise edges are removed from the last centers against the
    highest-indexed peripherals. The actual nnz is whatever the graph holds.
    """
    b = math.ceil(d_avg / 2)
    if b < 1 or n <= 2 * b:
        raise ValueError(f"need n > 2b, got n={n}, b={b}")
    complete = 2 * b * (n - b)
    target = round(d_avg * n)
    if target <= 0:
        raise ValueError("infeasible target nnz")
    centers, periph = biclique_edges(n, b)
    drop = max(0, (complete - target) // 2)
    if drop >= centers.size:
        raise ValueError("infeasible target nnz")
    if drop:
        # biclique_edges lists centers in ascending order with ascending
        # peripherals, so reversing gives last center / highest peripheral first
        keep = np.ones(centers.size, dtype=bool)
        keep[centers.size - drop:] = False
        centers, periph = centers[keep], periph[keep]
    return Graph.from_edges(n, centers, periph, symmetrize=True)


def gen_wheel(n: int, b_l: int, b_g: int) -> Graph:
    """Sum of the complete K(b_g, n - b_g) and a band of half-width b_l on the rim.

    Centers are 0..b_g-1; the rim b_g..n-1 carries a non-circulant band.
    """
    if b_l < 1 or b_g < 1 or n <= 2 * (b_l + b_g):
        raise ValueError(f"infeasible wheel parameters n={n}, b_l={b_l}, b_g={b_g}")
    cs, ps = biclique_edges(n, b_g)
    rs, rd = _band_edges(b_g, n, b_l)
    return Graph.from_edges(n, np.concatenate([cs, rs]), np.concatenate([ps, rd]), symmetrize=True)


def gen_ws(n: int, k_half: int, beta: float = 0.1, seed: int | None = 0) -> Graph:
    """Watts-Strogatz small world on a circulant ring lattice.

    For each lattice offset j = 1..k_half and each vertex u in turn, the edge
    (u, u + j) is rewired with probability ``beta`` to (u, w), w uniform over
    vertices that are neither u nor a current neighbor of u.
    """
    if not 1 <= k_half < n / 2:
        raise ValueError(f"need 1 <= k_half < n/2, got {k_half}")
    if not 0.0 <= beta <= 1.0:
        raise ValueError("beta must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    adj: list[set[int]] = [set() for _ in range(n)]
    base = np.arange(n, dtype=np.int64)
    for j in range(1, k_half + 1):
        for u, v in zip(base.tolist(), ((base + j) % n).tolist()):
            adj[u].add(v)
            adj[v].add(u)
    for j in range(1, k_half + 1):
        flips = rng.random(n) < beta
        for u in np.flatnonzero(flips).tolist():
            v = (u + j) % n
            if v not in adj[u] or len(adj[u]) >= n - 1:
                continue
            while True:
                w = int(rng.integers(n))
                if w != u and w not in adj[u]:
                    break
            adj[u].discard(v)
            adj[v].discard(u)
            adj[u].add(w)
            adj[w].add(u)
    src = np.repeat(base, [len(a) for a in adj])
    dst = np.fromiter((w for a in adj for w in a), dtype=np.int64, count=src.size)
    return Graph.from_edges(n, src, dst)


def gen_binomial_tree(k: int) -> Graph:
    """Binomial tree B_k on 2**k vertices rooted at 0.

    The parent of vertex i > 0 is i with its lowest set bit cleared, which is
    the recursive doubling construction (two B_{k-1} with roots linked).
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k > 30:
        raise ValueError("k too large")
    n = 1 << k
    child = np.arange(1, n, dtype=np.int64)
    parent = child & (child - 1)
    return Graph.from_edges(n, parent, child, symmetrize=True)


@dataclass
class GenSpec:
    """Parameters for :func:`generate`.

    ``extra`` holds kind-specific values: ``beta`` (ws), ``b_l``/``b_g``
    (wheel), ``k`` (binomial; n is then ignored).
    """

    kind: str
    n: int = 250_000
    d_avg: float = 14
    extra: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; choose from {KINDS}")
        if self.kind != "binomial" and self.n < 2:
            raise ValueError("n must be >= 2")


def generate(spec: GenSpec) -> Graph:
    kind, n, d = spec.kind, spec.n, spec.d_avg
    if kind == "conv1":
        return gen_conv1(n, int(spec.extra.get("b", math.ceil(d / 2))))
    if kind == "pok":
        return gen_pok(n, int(round(d)))
    if kind == "biclique":
        return gen_biclique(n, d)
    if kind == "wheel":
        b_g = int(spec.extra.get("b_g", math.ceil(d / 4)))
        b_l = int(spec.extra.get("b_l", max(1, math.ceil(d / 2) - b_g)))
        return gen_wheel(n, b_l, b_g)
    if kind == "ws":
        return gen_ws(n, int(spec.extra.get("k_half", math.ceil(d / 2))),
                      float(spec.extra.get("beta", 0.1)), spec.seed)
    return gen_binomial_tree(int(spec.extra.get("k", max(0, round(math.log2(max(n, 1)))))))
