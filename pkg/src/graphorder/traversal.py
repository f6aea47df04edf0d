"""Breadth-first level structures shared by RCM and the spectral start vector."""

from numba import njit


@njit(cache=True)
def _bfs_levels(indptr, indices, start, level, queue):
    """Plain BFS; returns (count, eccentricity). ``level`` must be -1 on entry."""
    level[start] = 0
    queue[0] = start
    qh, qt = 0, 1
    while qh < qt:
        v = queue[qh]
        qh += 1
        for p in range(indptr[v], indptr[v + 1]):
            u = indices[p]
            if level[u] < 0:
                level[u] = level[v] + 1
                queue[qt] = u
                qt += 1
    return qt, level[queue[qt - 1]]


@njit(cache=True)
def _pseudo_peripheral(indptr, indices, start, level, queue, deg):
    """George-Liu sweep: jump to the min-degree vertex of the last level."""
    cnt, ecc = _bfs_levels(indptr, indices, start, level, queue)
    while True:
        best = -1
        for i in range(cnt):
            v = queue[i]
            if level[v] == ecc and (best < 0 or deg[v] < deg[best] or (deg[v] == deg[best] and v < best)):
                best = v
        for i in range(cnt):
            level[queue[i]] = -1
        cnt2, ecc2 = _bfs_levels(indptr, indices, best, level, queue)
        if ecc2 <= ecc:
            for i in range(cnt2):
                level[queue[i]] = -1
            return start
        start, ecc, cnt = best, ecc2, cnt2
