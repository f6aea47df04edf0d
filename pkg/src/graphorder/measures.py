"""Adjacency access locality scores and their reference bounds.

mLogA is the mean bit length log2(1 + |pi(u) - pi(v)|) over stored entries.
mLogGapA is the mean bit length of gaps between consecutive neighbors once
each list is sorted by new position; the first neighbor costs one bit.
Both divide by m = nnz. Directed graphs are scored on their stored rows
(out-lists); score the transpose for in-lists.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from numba import njit

from .generators import biclique_edges
from .graph import Graph, Permutation


@njit(cache=True)
def _row_log_dist(indptr, indices, fwd):
    n = indptr.size - 1
    out = np.zeros(n)
    for v in range(n):
        pv = fwd[v]
        s = 0.0
        for p in range(indptr[v], indptr[v + 1]):
            s += np.log2(1.0 + abs(fwd[indices[p]] - pv))
        out[v] = s
    return out


@njit(cache=True)
def _row_log_gap(indptr, indices, fwd):
    n = indptr.size - 1
    out = np.zeros(n)
    for v in range(n):
        lo = indptr[v]
        d = indptr[v + 1] - lo
        if d == 0:
            continue
        pos = np.empty(d, dtype=np.int64)
        for i in range(d):
            pos[i] = fwd[indices[lo + i]]
        pos.sort()
        s = 1.0
        for i in range(1, d):
            s += np.log2(1.0 + (pos[i] - pos[i - 1]))
        out[v] = s
    return out


def _check(graph: Graph, perm: Permutation) -> None:
    if perm.n != graph.n:
        raise ValueError(f"permutation size {perm.n} != graph size {graph.n}")


def _mean(rows: np.ndarray, m: int) -> float:
    # fsum is exact, so the reported bits/link do not depend on row order
    return math.fsum(rows) / m


def mlog_a(graph: Graph, perm: Permutation) -> float:
    """Mean log-distance in bits per link; 0.0 with a warning when m = 0."""
    _check(graph, perm)
    if graph.nnz == 0:
        warnings.warn("graph has no edges; mLogA defined as 0", RuntimeWarning, stacklevel=2)
        return 0.0
    return _mean(_row_log_dist(graph.row_offsets, graph.col_indices, perm.forward), graph.nnz)


def mlog_gap_a(graph: Graph, perm: Permutation) -> float:
    """Mean log-gap in bits per link; isolated vertices contribute nothing."""
    _check(graph, perm)
    if graph.nnz == 0:
        warnings.warn("graph has no edges; mLogGapA defined as 0", RuntimeWarning, stacklevel=2)
        return 0.0
    return _mean(_row_log_gap(graph.row_offsets, graph.col_indices, perm.forward), graph.nnz)


def delta(graph: Graph, perm: Permutation) -> float:
    return mlog_a(graph, perm) - mlog_gap_a(graph, perm)


@dataclass(frozen=True)
class ReferenceBounds:
    """Reference scores for graphs of size n and average degree d_avg.

    The analytic references take the slack constant as exactly 1.
    ``warning_threshold`` is mLogA of the complete K(b, n - b) with its
    centers first, summed term by term.
    """

    n: int
    d_avg: float
    b: int
    lower: float
    conv1_ref: float
    wheel_ref: float
    upper_gap: float
    warning_threshold: float

    def as_dict(self) -> dict:
        return asdict(self)


def biclique_mlog_a(n: int, b: int) -> float:
    """mLogA of complete K(b, n - b) with centers at positions 0..b-1."""
    if not 1 <= b < n:
        raise ValueError("need 1 <= b < n")
    # every center-peripheral pair is stored in both directions
    centers, periph = biclique_edges(n, b)
    terms = np.log2(1.0 + (periph - centers).astype(np.float64))
    return 2.0 * math.fsum(terms) / (2 * centers.size)


def reference_bounds(n: int, d_avg: float) -> ReferenceBounds:
    if not 1 <= d_avg < n:
        raise ValueError(f"need 1 <= d_avg < n, got d_avg={d_avg}, n={n}")
    b = math.ceil(d_avg / 2)
    return ReferenceBounds(
        n=n,
        d_avg=float(d_avg),
        b=b,
        lower=1.0,
        conv1_ref=1.0 + (math.log2(3.0) - 1.0) / d_avg,
        wheel_ref=1.0 + math.log2(n - d_avg) / d_avg,
        upper_gap=1.0 + math.log2(1 + n - b),
        warning_threshold=biclique_mlog_a(n, b),
    )


@dataclass(frozen=True)
class AalReport:
    """Locality descriptor of one (graph, permutation) pair."""

    mlog_a: float
    mlog_gap_a: float
    delta: float
    m: int
    n: int
    d_avg: float
    bounds: ReferenceBounds | None
    warning: bool
    empty: bool = False

    def descriptor(self) -> str:
        """Two-decimal ``mLogGapA|delta`` pair."""
        return f"{self.mlog_gap_a:.2f}|{self.delta:.2f}"

    def to_json_dict(self) -> dict:
        return {
            "mlogA": self.mlog_a,
            "mlogGapA": self.mlog_gap_a,
            "delta": self.delta,
            "n": self.n,
            "m": self.m,
            "dAvg": self.d_avg,
            "bounds": self.bounds.as_dict() if self.bounds else None,
            "warning": self.warning,
        }


def evaluate(graph: Graph, perm: Permutation) -> AalReport:
    """Scores, reference bounds and the replace-this-ordering warning."""
    _check(graph, perm)
    n, m = graph.n, graph.nnz
    if m == 0:
        return AalReport(0.0, 0.0, 0.0, 0, n, 0.0, None, False, empty=True)
    a = _mean(_row_log_dist(graph.row_offsets, graph.col_indices, perm.forward), m)
    g = _mean(_row_log_gap(graph.row_offsets, graph.col_indices, perm.forward), m)
    d_avg = m / n
    bounds = reference_bounds(n, d_avg) if 1 <= d_avg < n else None
    # equality is the ideal biclique itself; row-wise rounding must not flag it
    warn = bounds is not None and a > bounds.warning_threshold * (1 + 1e-12)
    return AalReport(a, g, a - g, m, n, d_avg, bounds, bool(warn))
