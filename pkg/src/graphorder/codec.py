"""Gap encoding of permuted adjacency lists.

Stream layout (``VGC1``)::

    b"VGC1" | n: u64 LE | m: u64 LE | bit payload, MSB first

For every row ``r`` of the permuted graph, in order: ``gamma(d + 1)``; then,
when ``d > 0``, ``gamma(first + 1)`` for the smallest neighbor index and
``gamma(gap)`` for each further neighbor, ``gap >= 1`` being the distance to
the previous one. Zero bits pad the final byte.

``gamma(x)`` is Elias-gamma: ``floor(log2 x)`` zeros followed by ``x`` in
binary, ``2 floor(log2 x) + 1`` bits in total.

The ``VGV1`` variant stores the same integers as LEB128 varints (byte
aligned), which is faster to walk but tracks the log of the gaps only in
steps of seven bits.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
from numba import njit

from .graph import Graph, Permutation, apply_permutation

MAGIC_GAMMA = b"VGC1"
MAGIC_VARINT = b"VGV1"
_HEADER = struct.Struct("<4sQQ")


class CodecError(ValueError):
    """Malformed or truncated stream."""


@dataclass(frozen=True)
class EncodedGraph:
    n: int
    m: int
    payload: bytes
    payload_bits: int
    mode: str = "gamma"

    def to_bytes(self) -> bytes:
        magic = MAGIC_GAMMA if self.mode == "gamma" else MAGIC_VARINT
        return _HEADER.pack(magic, self.n, self.m) + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "EncodedGraph":
        if len(data) < _HEADER.size:
            raise CodecError(f"stream too short for header ({len(data)} bytes)")
        magic, n, m = _HEADER.unpack_from(data)
        if magic == MAGIC_GAMMA:
            mode = "gamma"
        elif magic == MAGIC_VARINT:
            mode = "varint"
        else:
            raise CodecError(f"bad magic {magic!r}")
        payload = bytes(data[_HEADER.size:])
        return cls(int(n), int(m), payload, 8 * len(payload), mode)

    @property
    def size_bytes(self) -> int:
        return _HEADER.size + len(self.payload)


# ---------------------------------------------------------------------------
# Elias-gamma


@njit(cache=True, inline="always")
def _gamma_len(x):
    k = 0
    while (x >> (k + 1)) > 0:
        k += 1
    return 2 * k + 1


@njit(cache=True)
def _gamma_bits(indptr, indices):
    """Payload bit count of the gamma stream for sorted rows."""
    total = 0
    for r in range(indptr.size - 1):
        a, b = indptr[r], indptr[r + 1]
        total += _gamma_len(b - a + 1)
        if b > a:
            total += _gamma_len(indices[a] + 1)
            for p in range(a + 1, b):
                total += _gamma_len(indices[p] - indices[p - 1])
    return total


@njit(cache=True, inline="always")
def _put(buf, pos, x, nbits):
    # write the low ``nbits`` of x, most significant first
    for i in range(nbits - 1, -1, -1):
        if (x >> i) & 1:
            buf[pos >> 3] |= np.uint8(0x80 >> (pos & 7))
        pos += 1
    return pos


@njit(cache=True, inline="always")
def _put_gamma(buf, pos, x):
    k = 0
    while (x >> (k + 1)) > 0:
        k += 1
    pos += k
    return _put(buf, pos, x, k + 1)


@njit(cache=True)
def _gamma_encode(indptr, indices, nbits):
    buf = np.zeros((nbits + 7) // 8, dtype=np.uint8)
    pos = 0
    for r in range(indptr.size - 1):
        a, b = indptr[r], indptr[r + 1]
        pos = _put_gamma(buf, pos, b - a + 1)
        if b > a:
            pos = _put_gamma(buf, pos, indices[a] + 1)
            for p in range(a + 1, b):
                pos = _put_gamma(buf, pos, indices[p] - indices[p - 1])
    return buf


@njit(cache=True)
def _get_gamma(buf, pos, limit):
    """(value, new pos); value -1 on truncation."""
    k = 0
    while True:
        if pos >= limit:
            return -1, pos
        if (buf[pos >> 3] >> (7 - (pos & 7))) & 1:
            break
        k += 1
        pos += 1
        if k > 62:
            return -2, pos
    if pos + k + 1 > limit:
        return -1, pos
    x = 0
    for _ in range(k + 1):
        x = (x << 1) | ((buf[pos >> 3] >> (7 - (pos & 7))) & 1)
        pos += 1
    return x, pos


@njit(cache=True)
def _gamma_decode(buf, n, m):
    """(indptr, indices, status, row): status 0 ok, 1 truncated, 2 zero gap,
    3 index out of range, 4 entry count mismatch, 5 overlong code."""
    limit = buf.size * 8
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = np.empty(m, dtype=np.int64)
    pos = 0
    q = 0
    for r in range(n):
        d1, pos = _get_gamma(buf, pos, limit)
        if d1 < 0:
            return indptr, indices, 1 if d1 == -1 else 5, r
        d = d1 - 1
        if q + d > m:
            return indptr, indices, 4, r
        if d > 0:
            f, pos = _get_gamma(buf, pos, limit)
            if f < 0:
                return indptr, indices, 1 if f == -1 else 5, r
            prev = f - 1
            if prev >= n:
                return indptr, indices, 3, r
            indices[q] = prev
            q += 1
            for _ in range(d - 1):
                g, pos = _get_gamma(buf, pos, limit)
                if g < 0:
                    return indptr, indices, 1 if g == -1 else 5, r
                if g == 0:
                    return indptr, indices, 2, r
                prev += g
                if prev >= n:
                    return indptr, indices, 3, r
                indices[q] = prev
                q += 1
        indptr[r + 1] = q
    if q != m:
        return indptr, indices, 4, n
    return indptr, indices, 0, n


# ---------------------------------------------------------------------------
# LEB128 varints


@njit(cache=True, inline="always")
def _varint_len(x):
    k = 1
    while x >= 128:
        x >>= 7
        k += 1
    return k


@njit(cache=True, inline="always")
def _put_varint(buf, pos, x):
    while x >= 128:
        buf[pos] = np.uint8((x & 127) | 128)
        x >>= 7
        pos += 1
    buf[pos] = np.uint8(x)
    return pos + 1


@njit(cache=True)
def _varint_encode(indptr, indices):
    size = 0
    for r in range(indptr.size - 1):
        a, b = indptr[r], indptr[r + 1]
        size += _varint_len(b - a + 1)
        if b > a:
            size += _varint_len(indices[a] + 1)
            for p in range(a + 1, b):
                size += _varint_len(indices[p] - indices[p - 1])
    buf = np.zeros(size, dtype=np.uint8)
    pos = 0
    for r in range(indptr.size - 1):
        a, b = indptr[r], indptr[r + 1]
        pos = _put_varint(buf, pos, b - a + 1)
        if b > a:
            pos = _put_varint(buf, pos, indices[a] + 1)
            for p in range(a + 1, b):
                pos = _put_varint(buf, pos, indices[p] - indices[p - 1])
    return buf


@njit(cache=True)
def _get_varint(buf, pos):
    x = 0
    shift = 0
    while True:
        if pos >= buf.size:
            return -1, pos
        c = buf[pos]
        pos += 1
        x |= np.int64(c & 127) << shift
        if c < 128:
            return x, pos
        shift += 7
        if shift > 56:
            return -2, pos


@njit(cache=True)
def _varint_decode(buf, n, m):
    indptr = np.zeros(n + 1, dtype=np.int64)
    indices = np.empty(m, dtype=np.int64)
    pos = 0
    q = 0
    for r in range(n):
        d1, pos = _get_varint(buf, pos)
        if d1 < 1:
            return indptr, indices, 1 if d1 == -1 else 5, r
        d = d1 - 1
        if q + d > m:
            return indptr, indices, 4, r
        if d > 0:
            f, pos = _get_varint(buf, pos)
            if f < 1:
                return indptr, indices, 1 if f == -1 else 5, r
            prev = f - 1
            if prev >= n:
                return indptr, indices, 3, r
            indices[q] = prev
            q += 1
            for _ in range(d - 1):
                g, pos = _get_varint(buf, pos)
                if g < 0:
                    return indptr, indices, 1 if g == -1 else 5, r
                if g == 0:
                    return indptr, indices, 2, r
                prev += g
                if prev >= n:
                    return indptr, indices, 3, r
                indices[q] = prev
                q += 1
        indptr[r + 1] = q
    if q != m:
        return indptr, indices, 4, n
    return indptr, indices, 0, n


# ---------------------------------------------------------------------------
# Public API

_STATUS = {
    1: "stream truncated in row {row}",
    2: "zero gap in row {row}",
    3: "neighbor index out of range in row {row}",
    4: "entry count disagrees with header (at row {row})",
    5: "malformed code in row {row}",
}


def _permuted(graph: Graph, perm: Permutation | None) -> Graph:
    if perm is None:
        return graph
    return apply_permutation(graph, perm)


def encode(graph: Graph, perm: Permutation | None = None, mode: str = "gamma") -> EncodedGraph:
    """Encode the rows of ``graph`` relabeled by ``perm``, in new-index order."""
    g = _permuted(graph, perm)
    indptr, indices = g.row_offsets, g.col_indices
    if mode == "gamma":
        nbits = int(_gamma_bits(indptr, indices))
        buf = _gamma_encode(indptr, indices, nbits)
    elif mode == "varint":
        buf = _varint_encode(indptr, indices)
        nbits = 8 * buf.size
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return EncodedGraph(g.n, g.nnz, buf.tobytes(), nbits, mode)


def decode(enc: EncodedGraph | bytes) -> Graph:
    if isinstance(enc, (bytes, bytearray, memoryview)):
        enc = EncodedGraph.from_bytes(bytes(enc))
    buf = np.frombuffer(enc.payload, dtype=np.uint8)
    # every row and every entry takes at least one bit; reject absurd
    # headers before allocating for them
    if enc.m > 8 * len(enc.payload) + 8:
        raise CodecError(f"header claims {enc.m} entries but the payload has {len(enc.payload)} bytes")
    if enc.n > 8 * len(enc.payload):
        raise CodecError(f"header claims {enc.n} rows but the payload has {len(enc.payload)} bytes")
    fn = _gamma_decode if enc.mode == "gamma" else _varint_decode
    indptr, indices, status, row = fn(buf, enc.n, enc.m)
    if status:
        raise CodecError(_STATUS[status].format(row=row))
    return Graph.from_csr(enc.n, indptr, indices)


def encoded_bits_per_link(graph: Graph, perm: Permutation | None = None) -> float:
    """Gamma payload bits divided by the number of stored entries."""
    g = _permuted(graph, perm)
    if g.nnz == 0:
        raise ValueError("graph has no stored entries")
    return int(_gamma_bits(g.row_offsets, g.col_indices)) / g.nnz


def write_encoded(enc: EncodedGraph, path) -> None:
    with open(path, "wb") as fh:
        fh.write(enc.to_bytes())


def read_encoded(path) -> EncodedGraph:
    with open(path, "rb") as fh:
        return EncodedGraph.from_bytes(fh.read())
