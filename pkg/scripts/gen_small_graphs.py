#!/usr/bin/env python3
"""Write every graph on n <= 9 vertices (up to isomorphism) as graph6.

Graphs on n vertices are grown from those on n - 1 by adding a vertex with
every possible neighbor set and deduplicating by nauty's canonical
certificate. The connected ones are written to ``tests/data/connected_n{n}.g6.gz``.

Run once; the output is committed. Needs ``pynauty`` and ``networkx``.
"""

from __future__ import annotations

import argparse
import gzip
from itertools import combinations
from pathlib import Path

import networkx as nx
import pynauty


def certificate(n: int, adj: list[set[int]]) -> bytes:
    g = pynauty.Graph(n, adjacency_dict={v: sorted(adj[v]) for v in range(n)})
    return pynauty.certificate(g)


def canonical_adj(n: int, adj: list[set[int]]) -> list[set[int]]:
    g = pynauty.Graph(n, adjacency_dict={v: sorted(adj[v]) for v in range(n)})
    lab = pynauty.canon_label(g)
    pos = {v: i for i, v in enumerate(lab)}
    out = [set() for _ in range(n)]
    for v in range(n):
        for u in adj[v]:
            out[pos[v]].add(pos[u])
    return out


def grow(prev: list[list[set[int]]], n: int) -> list[list[set[int]]]:
    seen = {}
    for adj in prev:
        for k in range(n):
            for nb in combinations(range(n - 1), k):
                new = [set(a) for a in adj] + [set(nb)]
                for u in nb:
                    new[u].add(n - 1)
                cert = certificate(n, new)
                if cert not in seen:
                    seen[cert] = canonical_adj(n, new)
    return list(seen.values())


def connected(n: int, adj: list[set[int]]) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == n


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-n", type=int, default=9)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parents[1] / "tests" / "data")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    level = [[set()]]
    for n in range(1, args.max_n + 1):
        if n > 1:
            level = grow(level, n)
        conn = [a for a in level if connected(n, a)]
        lines = []
        for adj in conn:
            g = nx.Graph()
            g.add_nodes_from(range(n))
            g.add_edges_from((v, u) for v in range(n) for u in adj[v] if v < u)
            lines.append(nx.to_graph6_bytes(g, header=False).strip())
        lines.sort()
        # fixed mtime keeps the files byte-reproducible
        with open(args.out / f"connected_n{n}.g6.gz", "wb") as raw, \
                gzip.GzipFile(fileobj=raw, mode="wb", mtime=0) as fh:
            fh.write(b"\n".join(lines) + b"\n")
        print(f"n={n}: {len(level)} graphs, {len(conn)} connected", flush=True)


if __name__ == "__main__":
    main()
