"""Approximate minimum degree ordering on a quotient graph.

Follows the Amestoy-Davis-Duff scheme: the elimination graph is kept
implicitly as variables plus elements (eliminated cliques), degrees are the
approximate external degrees, indistinguishable variables are merged into
supervariables found by hashing, and variables left adjacent only to the
new element are eliminated with it (mass elimination). Aggressive element
absorption is not done.

Rows denser than ``max(16, dense_alpha * sqrt(n))`` are withheld from the
elimination and placed last, as in the reference AMD; pass a negative
``dense_alpha`` to disable this.

Degree lists are LIFO buckets, so among equal degrees the most recently
updated variable goes first; initially the smallest id heads each bucket.
The pivots are then renumbered by a post-order of the assembly tree (as the
reference AMD does), which is again a valid elimination order. Isolated
vertices come first and withheld dense vertices last.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from ..graph import Graph, Permutation, connected_components, symmetrize

EMPTY = -1


@njit(cache=True, inline="always")
def _flip(i):
    return -i - 2


@njit(cache=True)
def _clear_flag(wflg, wbig, w, n):
    if wflg < 2 or wflg >= wbig:
        for x in range(n):
            if w[x] != 0:
                w[x] = 1
        wflg = 2
    return wflg


@njit(cache=True)
def _amd(n, indptr, indices, dense):
    nnz = indptr[n]
    iwlen = nnz + nnz // 5 + 2 * n + 64
    iw = np.empty(iwlen, dtype=np.int64)
    iw[:nnz] = indices[:nnz]
    pe = indptr[:n].copy()
    ln_ = np.empty(n, dtype=np.int64)
    for i in range(n):
        ln_[i] = indptr[i + 1] - indptr[i]
    pfree = nnz

    nv = np.ones(n, dtype=np.int64)
    nxt = np.full(n, EMPTY, dtype=np.int64)
    last = np.full(n, EMPTY, dtype=np.int64)
    head = np.full(n, EMPTY, dtype=np.int64)
    elen = np.zeros(n, dtype=np.int64)
    degree = ln_.copy()
    w = np.ones(n, dtype=np.int64)
    hhead = np.full(n, EMPTY, dtype=np.int64)
    hnext = np.full(n, EMPTY, dtype=np.int64)
    hval = np.zeros(n, dtype=np.int64)
    chain_next = np.full(n, EMPTY, dtype=np.int64)
    chain_tail = np.arange(n)
    is_dense = np.zeros(n, dtype=np.bool_)
    parent = np.full(n, EMPTY, dtype=np.int64)
    fsize = np.zeros(n, dtype=np.int64)
    # step at which a variable first joined a new element (or was pivoted)
    touched = np.full(n, n, dtype=np.int64)
    step = 0

    order = np.empty(n, dtype=np.int64)
    k = 0
    wbig = np.int64(2) ** 62 - n
    wflg = _clear_flag(0, wbig, w, n)

    nel = 0
    # reverse insertion leaves the smallest id at the head of each bucket
    for i in range(n - 1, -1, -1):
        deg = degree[i]
        if deg == 0:
            elen[i] = _flip(1)
            nel += 1
            pe[i] = EMPTY
            w[i] = 0
        elif deg > dense:
            is_dense[i] = True
            nv[i] = 0
            elen[i] = EMPTY
            nel += 1
            pe[i] = EMPTY
        else:
            inext = head[deg]
            if inext != EMPTY:
                last[inext] = i
            nxt[i] = inext
            head[deg] = i

    mindeg = 0
    lemax = 0
    while nel < n:
        # ---- pivot selection
        deg = mindeg
        while deg < n and head[deg] == EMPTY:
            deg += 1
        if deg >= n:
            break
        mindeg = deg
        me = head[deg]
        inext = nxt[me]
        if inext != EMPTY:
            last[inext] = EMPTY
        head[deg] = inext

        elenme = elen[me]
        nvpiv = nv[me]
        nel += nvpiv
        if touched[me] > step:
            touched[me] = step

        # ---- construct the new element Lme
        nv[me] = -nvpiv
        degme = 0
        if elenme == 0:
            pme1 = pe[me]
            pme2 = pme1 - 1
            for p in range(pme1, pme1 + ln_[me]):
                i = iw[p]
                nvi = nv[i]
                if nvi > 0:
                    degme += nvi
                    nv[i] = -nvi
                    if touched[i] > step:
                        touched[i] = step
                    pme2 += 1
                    iw[pme2] = i
                    ilast = last[i]
                    inext = nxt[i]
                    if inext != EMPTY:
                        last[inext] = ilast
                    if ilast != EMPTY:
                        nxt[ilast] = inext
                    else:
                        head[degree[i]] = inext
        else:
            p = pe[me]
            pme1 = pfree
            slenme = ln_[me] - elenme
            for knt1 in range(1, elenme + 2):
                if knt1 > elenme:
                    e = me
                    pj = p
                    ln = slenme
                else:
                    e = iw[p]
                    p += 1
                    pj = pe[e]
                    ln = ln_[e]
                for knt2 in range(1, ln + 1):
                    i = iw[pj]
                    pj += 1
                    nvi = nv[i]
                    if nvi <= 0:
                        continue
                    if pfree >= iwlen:
                        # garbage-collect iw, keeping only live lists
                        pe[me] = p
                        ln_[me] -= knt1
                        if ln_[me] == 0:
                            pe[me] = EMPTY
                        pe[e] = pj
                        ln_[e] = ln - knt2
                        if ln_[e] == 0:
                            pe[e] = EMPTY
                        for j in range(n):
                            pn = pe[j]
                            if pn >= 0:
                                pe[j] = iw[pn]
                                iw[pn] = _flip(j)
                        psrc = 0
                        pdst = 0
                        pend = pme1 - 1
                        while psrc <= pend:
                            j = _flip(iw[psrc])
                            psrc += 1
                            if j >= 0:
                                iw[pdst] = pe[j]
                                pe[j] = pdst
                                pdst += 1
                                for _ in range(ln_[j] - 1):
                                    iw[pdst] = iw[psrc]
                                    pdst += 1
                                    psrc += 1
                        p1 = pdst
                        for ps in range(pme1, pfree):
                            iw[pdst] = iw[ps]
                            pdst += 1
                        pme1 = p1
                        pfree = pdst
                        pj = pe[e]
                        p = pe[me]
                    degme += nvi
                    nv[i] = -nvi
                    if touched[i] > step:
                        touched[i] = step
                    iw[pfree] = i
                    pfree += 1
                    ilast = last[i]
                    inext = nxt[i]
                    if inext != EMPTY:
                        last[inext] = ilast
                    if ilast != EMPTY:
                        nxt[ilast] = inext
                    else:
                        head[degree[i]] = inext
                if e != me:
                    # element e is absorbed into me
                    pe[e] = _flip(me)
                    w[e] = 0
                    parent[e] = me
            pme2 = pfree - 1

        degree[me] = degme
        pe[me] = pme1
        ln_[me] = pme2 - pme1 + 1
        elen[me] = _flip(nvpiv + degme)
        wflg = _clear_flag(wflg, wbig, w, n)

        # ---- |Le \ Lme| for every element e adjacent to Lme, kept in w[e] - wflg
        for pme in range(pme1, pme2 + 1):
            i = iw[pme]
            eln = elen[i]
            if eln > 0:
                nvi = -nv[i]
                wnvi = wflg - nvi
                for p in range(pe[i], pe[i] + eln):
                    e = iw[p]
                    we = w[e]
                    if we >= wflg:
                        we -= nvi
                    elif we != 0:
                        we = degree[e] + wnvi
                    w[e] = we

        # ---- approximate degrees, list pruning, mass elimination, hashing
        for pme in range(pme1, pme2 + 1):
            i = iw[pme]
            p1 = pe[i]
            p2 = p1 + elen[i] - 1
            pn = p1
            hsh = 0
            deg = 0
            for p in range(p1, p2 + 1):
                e = iw[p]
                we = w[e]
                if we != 0:
                    deg += we - wflg
                    iw[pn] = e
                    pn += 1
                    hsh += e
            elen[i] = pn - p1 + 1
            p3 = pn
            p4 = p1 + ln_[i]
            for p in range(p2 + 1, p4):
                j = iw[p]
                nvj = nv[j]
                if nvj > 0:
                    deg += nvj
                    iw[pn] = j
                    pn += 1
                    hsh += j
            if elen[i] == 1 and p3 == pn:
                pe[i] = _flip(me)
                nvi = -nv[i]
                degme -= nvi
                nvpiv += nvi
                nel += nvi
                nv[i] = 0
                elen[i] = EMPTY
                chain_next[chain_tail[me]] = i
                chain_tail[me] = chain_tail[i]
            else:
                if deg < degree[i]:
                    degree[i] = deg
                iw[pn] = iw[p3]
                iw[p3] = iw[p1]
                iw[p1] = me
                ln_[i] = pn - p1 + 1
                hsh = hsh % n
                hnext[i] = hhead[hsh]
                hhead[hsh] = i
                hval[i] = hsh

        degree[me] = degme
        if degme > lemax:
            lemax = degme
        wflg += lemax
        wflg = _clear_flag(wflg, wbig, w, n)

        # ---- supervariable detection
        for pme in range(pme1, pme2 + 1):
            i = iw[pme]
            if nv[i] >= 0:
                continue
            hsh = hval[i]
            i = hhead[hsh]
            if i == EMPTY:
                continue
            hhead[hsh] = EMPTY
            while i != EMPTY and hnext[i] != EMPTY:
                ln = ln_[i]
                eln = elen[i]
                for p in range(pe[i] + 1, pe[i] + ln):
                    w[iw[p]] = wflg
                jlast = i
                j = hnext[i]
                while j != EMPTY:
                    ok = ln_[j] == ln and elen[j] == eln
                    p = pe[j] + 1
                    while ok and p < pe[j] + ln:
                        if w[iw[p]] != wflg:
                            ok = False
                        p += 1
                    if ok:
                        pe[j] = _flip(i)
                        nv[i] += nv[j]
                        nv[j] = 0
                        elen[j] = EMPTY
                        chain_next[chain_tail[i]] = j
                        chain_tail[i] = chain_tail[j]
                        j = hnext[j]
                        hnext[jlast] = j
                    else:
                        jlast = j
                        j = hnext[j]
                wflg += 1
                i = hnext[i]

        # ---- restore degree lists, drop non-principal variables from Lme
        p = pme1
        nleft = n - nel
        for pme in range(pme1, pme2 + 1):
            i = iw[pme]
            nvi = -nv[i]
            if nvi <= 0:
                continue
            nv[i] = nvi
            deg = degree[i] + degme - nvi
            if deg > nleft - nvi:
                deg = nleft - nvi
            inext = head[deg]
            if inext != EMPTY:
                last[inext] = i
            nxt[i] = inext
            last[i] = EMPTY
            head[deg] = i
            if deg < mindeg:
                mindeg = deg
            degree[i] = deg
            iw[p] = i
            p += 1
        nv[me] = nvpiv
        ln_[me] = p - pme1
        if ln_[me] == 0:
            pe[me] = EMPTY
            w[me] = 0
        if elenme != 0:
            pfree = p
        fsize[me] = nvpiv + degme
        order[k] = me
        k += 1
        step += 1

    return order[:k], parent, fsize, chain_next, is_dense, touched


@njit(cache=True)
def _emit_group(head, chain_next, touched, order, k, buf):
    """Write the group led by ``head`` into ``order`` at ``k``.

    Members of one group are interchangeable for fill, so they are listed
    by when they first met the elimination front, then by id.
    """
    g = 0
    j = head
    while j != EMPTY:
        buf[g] = j
        g += 1
        j = chain_next[j]
    if g == 1:
        order[k] = head
        return k + 1
    members = buf[:g]
    srt = members[np.argsort(touched[members] * order.size + members)]
    for t in range(g):
        order[k + t] = srt[t]
    return k + g


@njit(cache=True)
def _postorder(n, pivots, parent, fsize, chain_next, touched, is_dense, root_rank):
    """Depth-first post-order of the assembly tree, largest front last.

    Children are visited in ascending id except that the (last) child with
    the largest front goes last; roots follow ``root_rank`` then id.
    """
    child_head = np.full(n, EMPTY, dtype=np.int64)
    sibling = np.full(n, EMPTY, dtype=np.int64)
    is_piv = np.zeros(n, dtype=np.bool_)
    for i in range(pivots.size):
        is_piv[pivots[i]] = True
    for j in range(n - 1, -1, -1):
        if is_piv[j] and parent[j] != EMPTY:
            sibling[j] = child_head[parent[j]]
            child_head[parent[j]] = j
    for e in range(n):
        if not is_piv[e] or child_head[e] == EMPTY:
            continue
        # move the first child with the largest front to the end
        best = child_head[e]
        bprev = EMPTY
        prev = EMPTY
        c = child_head[e]
        while c != EMPTY:
            if fsize[c] >= fsize[best]:
                best = c
                bprev = prev
            prev = c
            c = sibling[c]
        if sibling[best] != EMPTY:
            if bprev == EMPTY:
                child_head[e] = sibling[best]
            else:
                sibling[bprev] = sibling[best]
            sibling[prev] = best
            sibling[best] = EMPTY

    roots = np.empty(pivots.size, dtype=np.int64)
    nr = 0
    for i in range(pivots.size):
        if parent[pivots[i]] == EMPTY:
            roots[nr] = pivots[i]
            nr += 1
    roots = roots[:nr]
    key = root_rank[roots] * n + roots
    roots = roots[np.argsort(key)]

    order = np.empty(n, dtype=np.int64)
    k = 0
    for i in range(n):
        if root_rank[i] < 0:
            order[k] = i
            k += 1
    stack = np.empty(n, dtype=np.int64)
    buf = np.empty(n, dtype=np.int64)
    for r in range(nr):
        sp = 0
        stack[0] = roots[r]
        sp = 1
        while sp > 0:
            e = stack[sp - 1]
            c = child_head[e]
            if c != EMPTY:
                child_head[e] = sibling[c]
                stack[sp] = c
                sp += 1
                continue
            sp -= 1
            k = _emit_group(e, chain_next, touched, order, k, buf)
    for i in range(n):
        if is_dense[i]:
            order[k] = i
            k += 1
    return order, k


@njit(cache=True)
def _flatten(n, pivots, chain_next, is_dense, deg):
    order = np.empty(n, dtype=np.int64)
    k = 0
    for i in range(n):
        if deg[i] == 0:
            order[k] = i
            k += 1
    for t in range(pivots.size):
        j = pivots[t]
        while j != EMPTY:
            order[k] = j
            k += 1
            j = chain_next[j]
    for i in range(n):
        if is_dense[i]:
            order[k] = i
            k += 1
    return order, k


def dense_threshold(n: int, dense_alpha: float = 10.0) -> int:
    if dense_alpha < 0:
        return n
    return int(min(n, max(16.0, dense_alpha * math.sqrt(n))))


def amd_order(graph: Graph, dense_alpha: float = 10.0, postorder: bool = True) -> np.ndarray:
    """Elimination sequence (vertex ids, earliest eliminated first).

    With ``postorder`` the pivots are renumbered by a post-order of the
    assembly tree, an equivalent elimination order (same fill) that keeps
    every subtree contiguous. Without it the raw pivot sequence is returned.
    """
    g = symmetrize(graph)
    if g.n == 0:
        return np.zeros(0, dtype=np.int64)
    pivots, parent, fsize, chain_next, is_dense, touched = _amd(
        g.n, g.row_offsets, g.col_indices, dense_threshold(g.n, dense_alpha))
    if postorder:
        labels = connected_components(g).labels.copy()
        labels[g.degrees() == 0] = -1
        order, k = _postorder(g.n, pivots, parent, fsize, chain_next, touched, is_dense, labels)
    else:
        order, k = _flatten(g.n, pivots, chain_next, is_dense, g.degrees())
    if k != g.n:
        raise RuntimeError(f"AMD emitted {k} of {g.n} vertices")
    return order


def amd(graph: Graph, dense_alpha: float = 10.0, postorder: bool = True) -> Permutation:
    """Approximate minimum degree ordering as a permutation."""
    return Permutation.from_order(amd_order(graph, dense_alpha, postorder))


# ---------------------------------------------------------------------------
# Reference implementations for testing


def minimum_degree_exact(graph: Graph) -> np.ndarray:
    """Exact minimum degree on the explicit elimination graph (small n only).

    Ties go to the smallest vertex id.
    """
    g = symmetrize(graph)
    adj = [set(g.neighbors(v).tolist()) for v in range(g.n)]
    alive = set(range(g.n))
    order = []
    while alive:
        v = min(alive, key=lambda x: (len(adj[x]), x))
        nb = adj[v]
        for u in nb:
            adj[u] |= nb
            adj[u].discard(u)
            adj[u].discard(v)
        alive.discard(v)
        order.append(v)
        adj[v] = set()
    return np.array(order, dtype=np.int64)


def fill_in(graph: Graph, order) -> int:
    """Number of fill edges created by eliminating vertices in ``order``."""
    g = symmetrize(graph)
    adj = [set(g.neighbors(v).tolist()) for v in range(g.n)]
    fill = 0
    for v in np.asarray(order).tolist():
        nb = list(adj[v])
        for a in range(len(nb)):
            ua = nb[a]
            for b in range(a + 1, len(nb)):
                ub = nb[b]
                if ub not in adj[ua]:
                    adj[ua].add(ub)
                    adj[ub].add(ua)
                    fill += 1
        for u in nb:
            adj[u].discard(v)
        adj[v] = set()
    return fill
