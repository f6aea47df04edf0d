"""Compressed-sparse-row graphs, permutations and structural utilities.

All vertex ids are 0-based. File formats document their own base.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import TextIO

import numpy as np
import scipy.sparse as sp
from numba import njit


class GraphFormatError(ValueError):
    """Malformed or out-of-range graph/permutation input."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable CSR adjacency pattern without self-loops or parallel edges.

    ``row_offsets`` has length ``n + 1``; ``col_indices[row_offsets[v]:row_offsets[v+1]]``
    is the strictly increasing neighbor list of ``v``. ``is_symmetric`` is
    computed from the pattern, never trusted from the caller.
    """

    n: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    is_symmetric: bool

    @classmethod
    def from_csr(cls, n: int, row_offsets, col_indices, check: bool = True) -> "Graph":
        indptr = _frozen(row_offsets)
        indices = _frozen(col_indices)
        if check:
            _validate_csr(n, indptr, indices)
        sym = _pattern_is_symmetric(n, indptr, indices)
        return cls(int(n), indptr, indices, sym)

    @classmethod
    def from_edges(cls, n: int, src, dst, symmetrize: bool = False) -> "Graph":
        """Build from parallel endpoint arrays; drops self-loops and duplicates."""
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("endpoint arrays differ in length")
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise GraphFormatError(f"edge endpoint outside [0, {n})")
        if symmetrize:
            src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
        keep = src != dst
        key = np.unique(src[keep] * np.int64(n) + dst[keep])
        rows = key // n
        cols = key - rows * n
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls.from_csr(n, indptr, cols, check=False)

    @classmethod
    def from_scipy(cls, a) -> "Graph":
        a = sp.csr_matrix(a)
        if a.shape[0] != a.shape[1]:
            raise GraphFormatError(f"adjacency must be square, got {a.shape}")
        coo = a.tocoo()
        return cls.from_edges(a.shape[0], coo.row, coo.col)

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls.from_csr(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64), check=False)

    @property
    def nnz(self) -> int:
        return int(self.row_offsets[-1])

    @property
    def d_avg(self) -> float:
        return self.nnz / self.n if self.n else 0.0

    def degrees(self) -> np.ndarray:
        return np.diff(self.row_offsets)

    def neighbors(self, v: int) -> np.ndarray:
        return self.col_indices[self.row_offsets[v]:self.row_offsets[v + 1]]

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Stored entries as (row, col) arrays."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        return rows, np.asarray(self.col_indices)

    def to_scipy(self, dtype=np.float64) -> sp.csr_matrix:
        data = np.ones(self.nnz, dtype=dtype)
        return sp.csr_matrix((data, self.col_indices, self.row_offsets), shape=(self.n, self.n))

    def transpose(self) -> "Graph":
        rows, cols = self.edges()
        return Graph.from_edges(self.n, cols, rows)

    def bandwidth(self) -> int:
        """Semi-bandwidth max |u - v| over stored entries (0 if no edges)."""
        if self.nnz == 0:
            return 0
        rows, cols = self.edges()
        return int(np.abs(rows - cols).max())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.n == other.n
                and np.array_equal(self.row_offsets, other.row_offsets)
                and np.array_equal(self.col_indices, other.col_indices))

    def __repr__(self) -> str:
        kind = "symmetric" if self.is_symmetric else "directed"
        return f"Graph(n={self.n}, nnz={self.nnz}, {kind})"


def _validate_csr(n: int, indptr: np.ndarray, indices: np.ndarray) -> None:
    if n < 0 or indptr.shape != (n + 1,):
        raise GraphFormatError("row_offsets must have length n + 1")
    if indptr[0] != 0 or indptr[-1] != indices.size or np.any(np.diff(indptr) < 0):
        raise GraphFormatError("row_offsets must start at 0, end at nnz and not decrease")
    if indices.size and (indices.min() < 0 or indices.max() >= n):
        raise GraphFormatError("col_indices out of range")
    bad = _first_bad_row(indptr, indices)
    if bad >= 0:
        raise GraphFormatError(f"row {bad} is unsorted, has duplicates or a self-loop")


@njit(cache=True)
def _first_bad_row(indptr, indices):
    n = indptr.size - 1
    for v in range(n):
        prev = -1
        for p in range(indptr[v], indptr[v + 1]):
            u = indices[p]
            if u <= prev or u == v:
                return v
            prev = u
    return -1


@njit(cache=True)
def _pattern_is_symmetric(n, indptr, indices):
    # binary search for (u, v) in row u for every stored (v, u)
    for v in range(n):
        for p in range(indptr[v], indptr[v + 1]):
            u = indices[p]
            lo = indptr[u]
            hi = indptr[u + 1]
            while lo < hi:
                mid = (lo + hi) // 2
                if indices[mid] < v:
                    lo = mid + 1
                else:
                    hi = mid
            if lo == indptr[u + 1] or indices[lo] != v:
                return False
    return True


# ---------------------------------------------------------------------------
# Permutations


@dataclass(frozen=True, eq=False)
class Permutation:
    """Bijection old vertex id -> new position, with its inverse.

    ``inverse[k]`` is the vertex placed at position ``k``, i.e. the ordering
    read front to back.
    """

    forward: np.ndarray
    inverse: np.ndarray

    def __post_init__(self):
        n = self.forward.size
        if self.inverse.size != n or not np.array_equal(self.inverse[self.forward], np.arange(n)):
            raise ValueError("forward and inverse are not consistent bijections")

    @classmethod
    def from_forward(cls, forward) -> "Permutation":
        forward = np.asarray(forward, dtype=np.int64).ravel()
        n = forward.size
        if n and (forward.min() < 0 or forward.max() >= n):
            raise ValueError("permutation entry out of range")
        inverse = np.full(n, -1, dtype=np.int64)
        inverse[forward] = np.arange(n, dtype=np.int64)
        if np.any(inverse < 0):
            raise ValueError("permutation has repeated entries")
        return cls(_frozen(forward), _frozen(inverse))

    @classmethod
    def from_order(cls, order) -> "Permutation":
        """From a vertex sequence: ``order[k]`` receives position ``k``."""
        order = np.asarray(order, dtype=np.int64).ravel()
        p = cls.from_forward(order)
        return cls(p.inverse, p.forward)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        a = np.arange(n, dtype=np.int64)
        return cls(_frozen(a), _frozen(a.copy()))

    @property
    def n(self) -> int:
        return int(self.forward.size)

    def inverted(self) -> "Permutation":
        return Permutation(self.inverse, self.forward)

    def then(self, other: "Permutation") -> "Permutation":
        """Apply ``self`` first, then ``other``."""
        if other.n != self.n:
            raise ValueError("permutation sizes differ")
        return Permutation.from_forward(other.forward[self.forward])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return np.array_equal(self.forward, other.forward)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"Permutation(n={self.n})"


def random_shuffle_permutation(n: int, seed: int | None = 0) -> Permutation:
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    return Permutation.from_forward(rng.permutation(n))


def apply_permutation(graph: Graph, perm: Permutation) -> Graph:
    """Relabel so that edge (u, v) becomes (perm(u), perm(v))."""
    if perm.n != graph.n:
        raise ValueError(f"permutation size {perm.n} != graph size {graph.n}")
    fwd = perm.forward
    deg = graph.degrees()
    indptr = np.zeros(graph.n + 1, dtype=np.int64)
    np.cumsum(deg[perm.inverse], out=indptr[1:])
    indices = _permute_rows(graph.row_offsets, graph.col_indices, fwd, perm.inverse, indptr)
    return Graph(graph.n, _frozen(indptr), _frozen(indices), graph.is_symmetric)


@njit(cache=True)
def _permute_rows(indptr, indices, fwd, inv, new_indptr):
    out = np.empty(indices.size, dtype=np.int64)
    for r in range(inv.size):
        v = inv[r]
        q = new_indptr[r]
        for p in range(indptr[v], indptr[v + 1]):
            out[q] = fwd[indices[p]]
            q += 1
        out[new_indptr[r]:q].sort()
    return out


# ---------------------------------------------------------------------------
# Structural transforms


def symmetrize(graph: Graph) -> Graph:
    """Pattern union A | A^T."""
    if graph.is_symmetric:
        return graph
    rows, cols = graph.edges()
    return Graph.from_edges(graph.n, rows, cols, symmetrize=True)


def bipartite_embed(graph: Graph) -> Graph:
    """Symmetric pattern of [[0, A], [A^T, 0]] on 2n vertices.

    Vertex ``i`` is row ``i`` of A and vertex ``n + j`` is column ``j``.
    """
    n = graph.n
    rows, cols = graph.edges()
    return Graph.from_edges(2 * n, rows, cols + n, symmetrize=True)


@dataclass(frozen=True)
class ComponentLabeling:
    """Weakly connected components, labeled 0.. in descending size.

    Equal-size components are ranked by their smallest vertex id.
    """

    labels: np.ndarray
    component_count: int
    component_sizes: np.ndarray

    def groups(self) -> list[np.ndarray]:
        """Vertex arrays per component (ascending ids), largest first."""
        order = np.argsort(self.labels, kind="stable")
        bounds = np.concatenate([[0], np.cumsum(self.component_sizes)])
        return [order[bounds[c]:bounds[c + 1]] for c in range(self.component_count)]


def connected_components(graph: Graph) -> ComponentLabeling:
    if graph.n == 0:
        e = np.zeros(0, dtype=np.int64)
        return ComponentLabeling(e, 0, e)
    raw, count = _weak_labels(graph.row_offsets, graph.col_indices)
    sizes = np.bincount(raw, minlength=count)
    # raw labels follow the first vertex of each component, so a stable
    # sort by size keeps the smallest-id tie rule
    rank = np.argsort(-sizes, kind="stable")
    relabel = np.empty(count, dtype=np.int64)
    relabel[rank] = np.arange(count)
    return ComponentLabeling(relabel[raw].astype(np.int64), int(count), sizes[rank].astype(np.int64))


@njit(cache=True)
def _weak_labels(indptr, indices):
    """Union-find over stored entries; labels numbered by first vertex."""
    n = indptr.size - 1
    uf = np.arange(n)
    for v in range(n):
        for p in range(indptr[v], indptr[v + 1]):
            a = v
            while uf[a] != a:
                uf[a] = uf[uf[a]]
                a = uf[a]
            b = indices[p]
            while uf[b] != b:
                uf[b] = uf[uf[b]]
                b = uf[b]
            if a != b:
                if a < b:
                    uf[b] = a
                else:
                    uf[a] = b
    labels = np.empty(n, dtype=np.int64)
    root_label = np.full(n, -1, dtype=np.int64)
    count = 0
    for v in range(n):
        r = v
        while uf[r] != r:
            r = uf[r]
        if root_label[r] < 0:
            root_label[r] = count
            count += 1
        labels[v] = root_label[r]
    return labels, count


def induced_subgraph(graph: Graph, vertices) -> tuple[Graph, np.ndarray]:
    """Subgraph on ``vertices``; local id ``i`` maps back to ``vertices[i]``."""
    vertices = np.asarray(vertices, dtype=np.int64).ravel()
    if vertices.size and (vertices.min() < 0 or vertices.max() >= graph.n):
        raise ValueError("vertex id out of range")
    local = np.full(graph.n, -1, dtype=np.int64)
    local[vertices] = np.arange(vertices.size)
    if np.count_nonzero(local >= 0) != vertices.size:
        raise ValueError("duplicate vertex ids")
    monotone = bool(np.all(np.diff(vertices) > 0))
    indptr, indices = _induced(graph.row_offsets, graph.col_indices, vertices, local, monotone)
    sub = Graph(int(vertices.size), _frozen(indptr), _frozen(indices),
                graph.is_symmetric or _pattern_is_symmetric(vertices.size, indptr, indices))
    vertices = vertices.copy()
    vertices.flags.writeable = False
    return sub, vertices


@njit(cache=True)
def _induced(indptr, indices, vertices, local, monotone):
    k = vertices.size
    new_indptr = np.zeros(k + 1, dtype=np.int64)
    for i in range(k):
        v = vertices[i]
        c = 0
        for p in range(indptr[v], indptr[v + 1]):
            if local[indices[p]] >= 0:
                c += 1
        new_indptr[i + 1] = new_indptr[i] + c
    out = np.empty(new_indptr[k], dtype=np.int64)
    for i in range(k):
        v = vertices[i]
        q = new_indptr[i]
        for p in range(indptr[v], indptr[v + 1]):
            j = local[indices[p]]
            if j >= 0:
                out[q] = j
                q += 1
        if not monotone:
            out[new_indptr[i]:q].sort()
    return new_indptr, out


# ---------------------------------------------------------------------------
# File formats


def _read_text(stream) -> str:
    if isinstance(stream, (str, bytes)):
        raise TypeError("expected a text stream, not a string; wrap it in io.StringIO")
    text = stream.read()
    if isinstance(text, bytes):
        text = text.decode()
    return text


def _int_tokens(tokens: list[str], what: str) -> np.ndarray:
    try:
        return np.array(tokens, dtype=np.int64)
    except (ValueError, OverflowError) as exc:
        raise GraphFormatError(f"non-integer {what}: {exc}") from None


def load_matrix_market(stream: TextIO) -> Graph:
    """Read a Matrix Market coordinate file (1-based); values are discarded."""
    text = _read_text(stream)
    if not text.strip():
        raise GraphFormatError("empty Matrix Market input")
    lines = text.splitlines()
    header = lines[0].split()
    if len(header) != 5 or header[0].lower() != "%%matrixmarket":
        raise GraphFormatError(f"bad Matrix Market banner: {lines[0]!r}")
    obj, fmt, field, symmetry = (h.lower() for h in header[1:])
    if obj != "matrix" or fmt != "coordinate":
        raise GraphFormatError("only 'matrix coordinate' files are supported")
    if field not in ("pattern", "integer", "real", "double"):
        raise GraphFormatError(f"unsupported field {field!r}")
    if symmetry not in ("general", "symmetric"):
        raise GraphFormatError(f"unsupported symmetry {symmetry!r}")
    body = [ln for ln in lines[1:] if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise GraphFormatError("missing size line")
    size = body[0].split()
    if len(size) != 3:
        raise GraphFormatError(f"bad size line: {body[0]!r}")
    nrows, ncols, nent = (int(s) for s in _int_tokens(size, "size line"))
    if nrows != ncols:
        raise GraphFormatError(f"adjacency matrix must be square, got {nrows}x{ncols}")
    width = 2 if field == "pattern" else 3
    tokens = " ".join(body[1:]).split()
    if len(tokens) != nent * width:
        raise GraphFormatError(f"expected {nent} entries of {width} fields, got {len(tokens)} tokens")
    rows = _int_tokens(tokens[0::width], "row index") - 1
    cols = _int_tokens(tokens[1::width], "column index") - 1
    if nent and (min(rows.min(), cols.min()) < 0 or max(rows.max(), cols.max()) >= nrows):
        raise GraphFormatError(f"entry index outside declared bounds 1..{nrows}")
    return Graph.from_edges(nrows, rows, cols, symmetrize=(symmetry == "symmetric"))


def save_matrix_market(graph: Graph, stream: TextIO, comment: str | None = None) -> None:
    """Write a pattern file; symmetric graphs store the lower triangle only."""
    rows, cols = graph.edges()
    if graph.is_symmetric:
        keep = rows > cols
        rows, cols = rows[keep], cols[keep]
        kind = "symmetric"
    else:
        kind = "general"
    stream.write(f"%%MatrixMarket matrix coordinate pattern {kind}\n")
    if comment:
        for line in comment.splitlines():
            stream.write(f"% {line}\n")
    stream.write(f"{graph.n} {graph.n} {rows.size}\n")
    if rows.size:
        buf = io.StringIO()
        np.savetxt(buf, np.column_stack([rows + 1, cols + 1]), fmt="%d")
        stream.write(buf.getvalue())


def load_edge_list(stream: TextIO, zero_based: bool = True, symmetrize: bool = True,
                   n: int | None = None) -> Graph:
    """Whitespace-separated integer pairs, one edge per line, ``#`` comments."""
    text = _read_text(stream)
    tokens: list[str] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("#") or s.startswith("%"):
            continue
        parts = s.split()
        if len(parts) < 2:
            raise GraphFormatError(f"line {lineno}: expected two vertex ids")
        tokens.extend(parts[:2])
    ids = _int_tokens(tokens, "vertex id").reshape(-1, 2)
    if not zero_based:
        ids = ids - 1
    if ids.size and ids.min() < 0:
        raise GraphFormatError("negative vertex id")
    size = int(ids.max()) + 1 if ids.size else 0
    if n is not None:
        if n < size:
            raise GraphFormatError(f"vertex id {size - 1} exceeds n={n}")
        size = n
    return Graph.from_edges(size, ids[:, 0], ids[:, 1], symmetrize=symmetrize)


def save_edge_list(graph: Graph, stream: TextIO) -> None:
    """0-based pairs; symmetric graphs list each undirected edge once."""
    rows, cols = graph.edges()
    if graph.is_symmetric:
        keep = rows < cols
        rows, cols = rows[keep], cols[keep]
    if rows.size:
        buf = io.StringIO()
        np.savetxt(buf, np.column_stack([rows, cols]), fmt="%d")
        stream.write(buf.getvalue())


def load_permutation(stream: TextIO) -> Permutation:
    """Line ``i`` holds ``forward[i]`` (0-based)."""
    tokens = _read_text(stream).split()
    try:
        return Permutation.from_forward(_int_tokens(tokens, "permutation entry"))
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from None


def save_permutation(perm: Permutation, stream: TextIO) -> None:
    stream.write("\n".join(map(str, perm.forward.tolist())))
    stream.write("\n")
