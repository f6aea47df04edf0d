"""Blocked subspace iteration X <- A X as an ordering-sensitive SpMM workload."""

from __future__ import annotations

import csv
import os
import statistics
import time
import warnings
from dataclasses import asdict, dataclass, field

import numba
import numpy as np
from numba import njit, prange

from .graph import Graph, Permutation, apply_permutation

THREADS_ENV = "GRAPHORDER_THREADS"

# numba probes TBB first and complains about old versions before falling
# back to another layer; the fallback is fine
warnings.filterwarnings("ignore", message="The TBB threading layer", category=numba.NumbaWarning)


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return 1


@dataclass(frozen=True)
class BenchConfig:
    d: int = 8
    p: int = 1
    iters: int = 10
    seed: int = 0
    repetitions: int = 5
    warmup: int = 1

    def __post_init__(self):
        if self.d < 1 or self.p < 1 or self.iters < 1 or self.repetitions < 1 or self.warmup < 0:
            raise ValueError("d, p, iters and repetitions must be >= 1 (warmup >= 0)")


@dataclass
class BenchResult:
    seconds: float
    partition_sizes: list = field(default_factory=list)
    checksum: float = 0.0
    samples: list = field(default_factory=list)


def row_partition(graph: Graph, p: int) -> np.ndarray:
    """Boundaries of ``p`` contiguous row blocks holding about equal nnz."""
    indptr = graph.row_offsets
    targets = np.linspace(0, indptr[-1], p + 1)
    bounds = np.searchsorted(indptr, targets, side="left")
    bounds[0], bounds[-1] = 0, graph.n
    return np.maximum.accumulate(bounds).astype(np.int64)


@njit(parallel=True, cache=True)
def _spmm(indptr, indices, x, y, bounds):
    d = x.shape[1]
    for b in prange(bounds.size - 1):
        for i in range(bounds[b], bounds[b + 1]):
            for c in range(d):
                y[i, c] = 0.0
            for q in range(indptr[i], indptr[i + 1]):
                j = indices[q]
                for c in range(d):
                    y[i, c] += x[j, c]


@njit(parallel=True, cache=True)
def _scale_columns(y):
    d = y.shape[1]
    for c in prange(d):
        m = 0.0
        for i in range(y.shape[0]):
            a = abs(y[i, c])
            if a > m:
                m = a
        if m > 0.0:
            for i in range(y.shape[0]):
                y[i, c] /= m


def spmm_block(graph: Graph, x: np.ndarray, p: int = 1, out: np.ndarray | None = None,
               bounds: np.ndarray | None = None) -> np.ndarray:
    """Y[i] = sum of X[j] over the stored neighbors j of row i."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != graph.n:
        raise ValueError(f"X must have shape ({graph.n}, d), got {x.shape}")
    y = np.empty_like(x) if out is None else out
    if bounds is None:
        bounds = row_partition(graph, p)
    with _threads(p):
        _spmm(graph.row_offsets, graph.col_indices, x, y, bounds)
    return y


class _threads:
    def __init__(self, p: int):
        self.p = min(p, numba.config.NUMBA_NUM_THREADS)

    def __enter__(self):
        self.prev = numba.get_num_threads()
        numba.set_num_threads(self.p)

    def __exit__(self, *exc):
        numba.set_num_threads(self.prev)


def initial_block(n: int, d: int, seed: int = 0) -> np.ndarray:
    return np.random.default_rng(seed).standard_normal((n, d))


def _iterate(graph: Graph, x: np.ndarray, cfg: BenchConfig, bounds) -> np.ndarray:
    y = np.empty_like(x)
    for _ in range(cfg.iters):
        _spmm(graph.row_offsets, graph.col_indices, x, y, bounds)
        _scale_columns(y)
        x, y = y, x
    return x


def subspace_iterate(graph: Graph, cfg: BenchConfig | None = None, x0: np.ndarray | None = None) -> BenchResult:
    """Median wall time of ``iters`` scaled applications of A to an n x d block.

    Pass ``x0`` (already permuted) to compare orderings on the same start
    block; the checksum sum|X| is then ordering-invariant.
    """
    cfg = cfg or BenchConfig()
    x0 = initial_block(graph.n, cfg.d, cfg.seed) if x0 is None else np.ascontiguousarray(x0, dtype=np.float64)
    bounds = row_partition(graph, cfg.p)
    samples = []
    final = None
    with _threads(cfg.p):
        for rep in range(cfg.warmup + cfg.repetitions):
            x = x0.copy()
            t0 = time.perf_counter()
            x = _iterate(graph, x, cfg, bounds)
            dt = time.perf_counter() - t0
            if rep >= cfg.warmup:
                samples.append(dt)
            final = x
    seconds = max(statistics.median(samples), 1e-12)
    sizes = [int(graph.row_offsets[b1] - graph.row_offsets[b0]) for b0, b1 in zip(bounds[:-1], bounds[1:])]
    return BenchResult(seconds, sizes, float(np.abs(final).sum()), samples)


def compare_orderings(graph: Graph, perms: dict[str, Permutation], cfg: BenchConfig) -> list[dict]:
    """One row per ordering; every run starts from the same block, permuted."""
    x0 = initial_block(graph.n, cfg.d, cfg.seed)
    rows = []
    for name, perm in perms.items():
        g = apply_permutation(graph, perm)
        xp = np.empty_like(x0)
        xp[perm.forward] = x0
        res = subspace_iterate(g, cfg, xp)
        rows.append({"ordering": name, "d": cfg.d, "p": cfg.p, "seconds": res.seconds, "checksum": res.checksum})
    return rows


def write_csv(rows: list[dict], stream) -> None:
    if not rows:
        return
    w = csv.DictWriter(stream, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)


def config_dict(cfg: BenchConfig) -> dict:
    return asdict(cfg)
