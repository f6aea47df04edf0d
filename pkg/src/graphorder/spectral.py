"""Fiedler vectors of the normalized Laplacian L = I - D^-1/2 A D^-1/2.

The second-smallest eigenpair is found by block LOBPCG (block size 2) in
the complement of the known null vector d^1/2, which is projected out of
every search direction. The second block column tracks the third
eigenvalue so near-multiplicities can be reported. Small graphs go to a
dense symmetric eigensolver instead.

Search directions are preconditioned by the Laplacian of a maximum
spanning tree, weighting each edge by the number of triangles through it,
so the tree follows the densest local structure (the spine of a band, the
ring of a lattice, the tree itself for trees). Tree systems are solved
exactly in linear time.

Start vectors are structural: the BFS level of each vertex from a
pseudo-peripheral vertex, and its square. They already follow the long
axis of path-like graphs, which is where Krylov-type solvers are slowest.
The seed only feeds the random fill-in used when those columns are
linearly dependent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .graph import Graph, Permutation, connected_components
from .traversal import _bfs_levels, _pseudo_peripheral


class SpectralError(ValueError):
    """Input outside the domain of the Fiedler solver."""


class DegenerateSpectrumError(RuntimeError):
    """Second and third eigenvalues coincide, so no canonical cut exists."""


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-6
    max_iters: int = 5000
    seed: int = 0
    dense_max: int = 200
    degenerate_rtol: float = 1e-6
    refresh_every: int = 40
    precondition: bool = True

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class FiedlerResult:
    vector: np.ndarray
    eigenvalue_estimate: float
    residual_norm: float
    iterations_used: int
    converged: bool
    degenerate: bool = False
    third_eigenvalue_estimate: float = float("nan")


def _check_input(graph: Graph) -> np.ndarray:
    if graph.n < 2:
        raise SpectralError("need at least 2 vertices")
    if not graph.is_symmetric:
        raise SpectralError("graph must be symmetric")
    deg = graph.degrees()
    if np.any(deg == 0):
        raise SpectralError("graph has a zero-degree vertex")
    if connected_components(graph).component_count != 1:
        raise SpectralError("graph is disconnected")
    return deg


@njit(cache=True)
def _edge_weights(indptr, indices):
    """Upper-triangle edges (u < v) with 1 + |N(u) & N(v)| as weight.

    Sorted lists are merged, except that a much longer list is searched
    by bisection so hubs do not cost their full degree per edge.
    """
    n = indptr.size - 1
    m = 0
    for u in range(n):
        for p in range(indptr[u], indptr[u + 1]):
            if indices[p] > u:
                m += 1
    eu = np.empty(m, dtype=np.int64)
    ev = np.empty(m, dtype=np.int64)
    wt = np.empty(m, dtype=np.int64)
    k = 0
    for u in range(n):
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if v <= u:
                continue
            a, b = u, v
            da = indptr[a + 1] - indptr[a]
            db = indptr[b + 1] - indptr[b]
            if da > db:
                a, b = v, u
                da, db = db, da
            c = 0
            if db > 16 * da:
                lo, hi = indptr[b], indptr[b + 1]
                big = indices[lo:hi]
                for q in range(indptr[a], indptr[a + 1]):
                    x = indices[q]
                    j = np.searchsorted(big, x)
                    if j < hi - lo and big[j] == x:
                        c += 1
            else:
                i, j = indptr[a], indptr[b]
                ie, je = indptr[a + 1], indptr[b + 1]
                while i < ie and j < je:
                    x, y = indices[i], indices[j]
                    if x == y:
                        c += 1
                        i += 1
                        j += 1
                    elif x < y:
                        i += 1
                    else:
                        j += 1
            eu[k] = u
            ev[k] = v
            wt[k] = c + 1
            k += 1
    return eu, ev, wt


@njit(cache=True)
def _heaviest_first(wt):
    """Stable counting sort of edge ids by weight, descending."""
    top = 0
    for w in wt:
        if w > top:
            top = w
    cnt = np.zeros(top + 2, dtype=np.int64)
    for w in wt:
        cnt[top - w + 1] += 1
    for i in range(1, top + 2):
        cnt[i] += cnt[i - 1]
    out = np.empty(wt.size, dtype=np.int64)
    for e in range(wt.size):
        slot = top - wt[e]
        out[cnt[slot]] = e
        cnt[slot] += 1
    return out


@njit(cache=True)
def _find(uf, x):
    while uf[x] != x:
        uf[x] = uf[uf[x]]
        x = uf[x]
    return x


@njit(cache=True)
def _spanning_tree(n, eu, ev, order):
    """Kruskal over edges in the given order; returns parent and BFS order."""
    uf = np.arange(n)
    tdeg = np.zeros(n, dtype=np.int64)
    tu = np.empty(n - 1, dtype=np.int64)
    tv = np.empty(n - 1, dtype=np.int64)
    k = 0
    for i in range(order.size):
        e = order[i]
        a = _find(uf, eu[e])
        b = _find(uf, ev[e])
        if a == b:
            continue
        uf[a] = b
        tu[k] = eu[e]
        tv[k] = ev[e]
        tdeg[eu[e]] += 1
        tdeg[ev[e]] += 1
        k += 1
        if k == n - 1:
            break
    ptr = np.zeros(n + 1, dtype=np.int64)
    for v in range(n):
        ptr[v + 1] = ptr[v] + tdeg[v]
    fill = ptr[:n].copy()
    adj = np.empty(2 * k, dtype=np.int64)
    for i in range(k):
        adj[fill[tu[i]]] = tv[i]
        fill[tu[i]] += 1
        adj[fill[tv[i]]] = tu[i]
        fill[tv[i]] += 1
    parent = np.full(n, -1, dtype=np.int64)
    bfs = np.empty(n, dtype=np.int64)
    seen = np.zeros(n, dtype=np.bool_)
    bfs[0] = 0
    seen[0] = True
    qh, qt = 0, 1
    while qh < qt:
        v = bfs[qh]
        qh += 1
        for p in range(ptr[v], ptr[v + 1]):
            u = adj[p]
            if not seen[u]:
                seen[u] = True
                parent[u] = v
                bfs[qt] = u
                qt += 1
    return parent, bfs, qt


@njit(cache=True)
def _tree_solve(parent, bfs, r):
    """Minimum-norm solution of L_T y = r for mean-zero columns of r."""
    n, k = r.shape
    acc = r.copy()
    for i in range(n - 1, 0, -1):
        v = bfs[i]
        for j in range(k):
            acc[parent[v], j] += acc[v, j]
    y = np.zeros((n, k))
    for i in range(1, n):
        v = bfs[i]
        for j in range(k):
            y[v, j] = y[parent[v], j] + acc[v, j]
    for j in range(k):
        mu = 0.0
        for v in range(n):
            mu += y[v, j]
        mu /= n
        for v in range(n):
            y[v, j] -= mu
    return y


class _TreePreconditioner:
    """Approximates L_sym^+ by D^1/2 L_T^+ D^1/2 for a spanning tree T."""

    def __init__(self, graph: Graph, deg: np.ndarray):
        n = graph.n
        eu, ev, wt = _edge_weights(graph.row_offsets, graph.col_indices)
        order = _heaviest_first(wt)
        self.parent, self.bfs, reached = _spanning_tree(n, eu, ev, order)
        if reached != n:
            raise SpectralError("graph is disconnected")
        self.h = np.sqrt(deg.astype(np.float64))[:, None]

    def __call__(self, r: np.ndarray) -> np.ndarray:
        t = self.h * r
        t -= t.mean(axis=0)
        return self.h * _tree_solve(self.parent, self.bfs, np.ascontiguousarray(t))


@njit(cache=True)
def _lap_apply(indptr, indices, s, x):
    """Rows of (I - S A S) x, S = diag(s), for a block x of shape (n, k)."""
    n, k = x.shape
    sx = np.empty((n, k))
    for i in range(n):
        for j in range(k):
            sx[i, j] = s[i] * x[i, j]
    out = np.empty((n, k))
    acc = np.empty(k)
    for i in range(n):
        for j in range(k):
            acc[j] = 0.0
        for p in range(indptr[i], indptr[i + 1]):
            c = indices[p]
            for j in range(k):
                acc[j] += sx[c, j]
        for j in range(k):
            out[i, j] = x[i, j] - s[i] * acc[j]
    return out


class _NormalizedLaplacian:
    def __init__(self, graph: Graph, deg: np.ndarray):
        self.indptr = graph.row_offsets
        self.indices = graph.col_indices
        self.s = 1.0 / np.sqrt(deg.astype(np.float64))
        q = np.sqrt(deg.astype(np.float64))
        self.q = q / np.linalg.norm(q)
        self.applications = 0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        self.applications += 1
        return _lap_apply(self.indptr, self.indices, self.s, np.ascontiguousarray(x))

    def dense(self) -> np.ndarray:
        n = self.s.size
        a = np.zeros((n, n))
        for i in range(n):
            a[i, self.indices[self.indptr[i]:self.indptr[i + 1]]] = 1.0
        return np.eye(n) - self.s[:, None] * a * self.s[None, :]

    def deflate(self, x: np.ndarray) -> np.ndarray:
        return x - np.outer(self.q, self.q @ x)


def _orthonormal_basis(s: np.ndarray, cut: float = 1e-10):
    """Coefficients C with S @ C orthonormal, dropping dependent directions."""
    norms = np.linalg.norm(s, axis=0)
    norms[norms == 0] = 1.0
    c = np.diag(1.0 / norms)
    for _ in range(2):
        t = s @ c
        g = t.T @ t
        ev, vec = np.linalg.eigh((g + g.T) / 2)
        keep = ev > cut * ev.max()
        c = c @ (vec[:, keep] / np.sqrt(ev[keep]))
        if ev[keep].min() > 1e-4 * ev.max():
            break
    return c


def level_structure(graph: Graph, deg: np.ndarray | None = None) -> np.ndarray:
    """BFS level of every vertex from a pseudo-peripheral root (connected input)."""
    n = graph.n
    if deg is None:
        deg = graph.degrees()
    level = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    start = int(np.lexsort((np.arange(n), deg))[0])
    root = _pseudo_peripheral(graph.row_offsets, graph.col_indices, start, level, queue, deg)
    level[:] = -1
    _bfs_levels(graph.row_offsets, graph.col_indices, root, level, queue)
    return level


def _structural_start(graph: Graph, deg: np.ndarray, rng) -> np.ndarray:
    lv = level_structure(graph, deg).astype(np.float64)
    lv /= max(lv.max(), 1.0)
    x = np.column_stack([lv, lv * lv])
    return x + 1e-3 * rng.standard_normal(x.shape) * x.std()


def _lobpcg(op: _NormalizedLaplacian, x0: np.ndarray, cfg: SolverConfig, rng, prec=None):
    n, k = x0.shape
    x = op.deflate(x0)
    if np.linalg.matrix_rank(x) < k:
        x = op.deflate(x + rng.standard_normal(x.shape))
    x = x @ _orthonormal_basis(x)
    ax = op(x)
    h = x.T @ ax
    lam, z = np.linalg.eigh((h + h.T) / 2)
    x, ax = x @ z, ax @ z
    p = ap = None
    rn = np.full(k, np.inf)
    it = 0
    while True:
        r = ax - x * lam
        rn = np.linalg.norm(r, axis=0)
        if rn[0] <= cfg.tol or it >= cfg.max_iters:
            break
        it += 1
        r = op.deflate(r)
        ar = op(r)
        blocks, images = [x, r], [ax, ar]
        if prec is not None:
            # the tree solve can be poor where long edges dominate; keeping
            # the raw residual alongside makes that harmless
            w = op.deflate(prec(r))
            blocks.append(w)
            images.append(op(w))
        if p is not None:
            blocks.append(p)
            images.append(ap)
        s = np.hstack(blocks)
        as_ = np.hstack(images)
        c = _orthonormal_basis(s)
        h = c.T @ (s.T @ as_) @ c
        theta, zz = np.linalg.eigh((h + h.T) / 2)
        y = c @ zz[:, :k]
        lam = theta[:k]
        p = s[:, k:] @ y[k:]
        ap = as_[:, k:] @ y[k:]
        x = s @ y
        ax = as_ @ y
        if it % cfg.refresh_every == 0:
            # rebuild images from scratch to stop round-off drift
            x = op.deflate(x)
            x = x @ _orthonormal_basis(x)
            ax = op(x)
            h = x.T @ ax
            lam, z = np.linalg.eigh((h + h.T) / 2)
            x, ax = x @ z, ax @ z
            p = ap = None
    return x, lam, rn, it


def _probe_next(op: _NormalizedLaplacian, x: np.ndarray, lam2: float, cfg: SolverConfig, rng,
                prec=None, steps: int = 8) -> float:
    """Upper bound on the next eigenvalue after ``lam2``.

    Minimizes the Rayleigh quotient over vectors orthogonal to both the
    null vector and ``x``. A block that happens to start inside an invariant
    subspace never sees a repeated eigenvalue, so this is checked apart.
    Stops as soon as the bound reaches ``lam2`` within the degeneracy
    tolerance.
    """
    q2 = x[:, 0] / np.linalg.norm(x)

    def defl(v):
        v = op.deflate(v)
        return v - np.outer(q2, q2 @ v)

    z = defl(rng.standard_normal((x.shape[0], 1)))
    z /= np.linalg.norm(z)
    az = op(z)
    mu = float(z[:, 0] @ az[:, 0])
    p = ap = None
    for _ in range(steps):
        if _degenerate(lam2, mu, cfg.degenerate_rtol):
            break
        r = defl(az - mu * z)
        if np.linalg.norm(r) <= cfg.tol:
            break
        blocks, images = [z, r], [az, op(r)]
        if prec is not None:
            w = defl(prec(r))
            blocks.append(w)
            images.append(op(w))
        if p is not None:
            blocks.append(p)
            images.append(ap)
        s_ = np.hstack(blocks)
        as_ = np.hstack(images)
        c = _orthonormal_basis(s_)
        h = c.T @ (s_.T @ as_) @ c
        theta, zz = np.linalg.eigh((h + h.T) / 2)
        y = c @ zz[:, :1]
        mu = float(theta[0])
        p, ap = s_[:, 1:] @ y[1:], as_[:, 1:] @ y[1:]
        z, az = s_ @ y, as_ @ y
    return mu


def _degenerate(lam2: float, lam3: float, rtol: float) -> bool:
    return lam3 - lam2 <= rtol * max(abs(lam3), 1e-300)


def fiedler_vector(graph: Graph, config: SolverConfig | None = None, start=None) -> FiedlerResult:
    """Second eigenvector of the normalized Laplacian, unit norm.

    ``start`` optionally replaces the structural first start column.
    """
    cfg = config or SolverConfig()
    deg = _check_input(graph)
    n = graph.n
    op = _NormalizedLaplacian(graph, deg)
    if n <= max(cfg.dense_max, 2):
        lap = op.dense()
        w, v = np.linalg.eigh(lap)
        vec = v[:, 1]
        lam2 = float(w[1])
        lam3 = float(w[2]) if n > 2 else float("inf")
        res = float(np.linalg.norm(lap @ vec - lam2 * vec))
        return FiedlerResult(vec, lam2, res, 0, True,
                             n > 2 and _degenerate(lam2, lam3, cfg.degenerate_rtol), lam3)
    rng = np.random.default_rng(cfg.seed)
    x0 = _structural_start(graph, deg, rng)
    if start is not None:
        x0[:, 0] = np.asarray(start, dtype=np.float64)
    prec = _TreePreconditioner(graph, deg) if cfg.precondition else None
    x, lam, rn, it = _lobpcg(op, x0, cfg, rng, prec)
    vec = op.deflate(x[:, :1])[:, 0]
    vec /= np.linalg.norm(vec)
    converged = bool(rn[0] <= cfg.tol)
    # Ritz values bound the eigenvalues from above, so a tiny gap to either
    # the second Ritz value or the probe proves lambda3 ~ lambda2
    lam3 = float(lam[1])
    if converged and not _degenerate(lam[0], lam3, cfg.degenerate_rtol):
        lam3 = min(lam3, _probe_next(op, vec[:, None], float(lam[0]), cfg, rng, prec))
    degen = bool(converged and _degenerate(lam[0], lam3, cfg.degenerate_rtol))
    return FiedlerResult(vec, float(lam[0]), float(rn[0]), it, converged, degen, lam3)


def canonical_sign(vec: np.ndarray) -> np.ndarray:
    """Flip so that vertex 0 (or the first nonzero entry) is not positive."""
    nz = np.flatnonzero(vec)
    if nz.size and vec[nz[0]] > 0:
        return -vec
    return vec


def order_by_values(values: np.ndarray) -> np.ndarray:
    """Vertex ids sorted by value ascending, ties by id."""
    return np.lexsort((np.arange(values.size), values))


def fiedler_order(graph: Graph, config: SolverConfig | None = None) -> Permutation:
    """Vertices sorted by Fiedler entry, ties by id.

    When the eigenvalue is (numerically) repeated the returned vector is an
    arbitrary member of a large eigenspace and would scatter structurally
    equivalent vertices; the BFS level from a pseudo-peripheral root then
    becomes the primary key and the vector only breaks ties within a level.
    """
    return order_from_result(graph, fiedler_vector(graph, config))


def order_from_result(graph: Graph, res: FiedlerResult) -> Permutation:
    """The fcut1 order for an already computed Fiedler result."""
    vec = canonical_sign(res.vector)
    if not res.degenerate:
        return Permutation.from_order(order_by_values(vec))
    level = level_structure(graph)
    return Permutation.from_order(np.lexsort((np.arange(graph.n), vec, level)))


def median_split(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Lowest floor(n/2) entries (ties by id) versus the rest, ascending ids."""
    order = order_by_values(values)
    half = values.size // 2
    return np.sort(order[:half]), np.sort(order[half:])


def fiedler_cut(graph: Graph, config: SolverConfig | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Median split of the canonically signed Fiedler vector."""
    res = fiedler_vector(graph, config)
    if res.degenerate:
        raise DegenerateSpectrumError(
            f"lambda2={res.eigenvalue_estimate:.6g} ~ lambda3={res.third_eigenvalue_estimate:.6g}")
    return median_split(canonical_sign(res.vector))
