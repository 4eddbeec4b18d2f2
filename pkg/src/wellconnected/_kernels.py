"""Compiled inner loops over CSR adjacency.

Every kernel takes ``indptr``/``indices`` (int64 CSR of an undirected graph)
plus boolean vertex masks, so the same code serves full graphs and induced
subgraph views.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def bfs(indptr, indices, enter, expand, source):
    """Unit-weight BFS distances from ``source`` (-1 = unreachable).

    A vertex is labelled only if ``enter`` is set and its neighbours are
    scanned only if ``expand`` is set. The source is always scanned.
    """
    n = enter.shape[0]
    dist = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    dist[source] = 0
    queue[0] = source
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        if u != source and not expand[u]:
            continue
        du = dist[u] + 1
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            if dist[w] < 0 and enter[w]:
                dist[w] = du
                queue[tail] = w
                tail += 1
    return dist


@njit(cache=True)
def articulation_points(indptr, indices, active):
    """Iterative Tarjan low-link over the active subgraph.

    Returns ``(is_ap, reached, n_active)``; the caller compares ``reached``
    with ``n_active`` to detect a disconnected active subgraph.
    """
    n = active.shape[0]
    is_ap = np.zeros(n, np.bool_)
    n_active = 0
    root = -1
    for v in range(n):
        if active[v]:
            n_active += 1
            if root < 0:
                root = v
    if root < 0:
        return is_ap, 0, 0
    disc = np.full(n, -1, np.int64)
    low = np.zeros(n, np.int64)
    parent = np.full(n, -1, np.int64)
    cursor = np.zeros(n, np.int64)
    stack = np.empty(n, np.int64)
    disc[root] = 0
    low[root] = 0
    cursor[root] = indptr[root]
    stack[0] = root
    top = 1
    clock = 1
    root_children = 0
    while top > 0:
        v = stack[top - 1]
        if cursor[v] < indptr[v + 1]:
            w = indices[cursor[v]]
            cursor[v] += 1
            if not active[w]:
                continue
            if disc[w] < 0:
                disc[w] = clock
                low[w] = clock
                clock += 1
                parent[w] = v
                cursor[w] = indptr[w]
                stack[top] = w
                top += 1
            elif w != parent[v] and disc[w] < low[v]:
                low[v] = disc[w]
        else:
            top -= 1
            p = parent[v]
            if p >= 0:
                if low[v] < low[p]:
                    low[p] = low[v]
                if p == root:
                    root_children += 1
                elif low[v] >= disc[p]:
                    is_ap[p] = True
    if root_children > 1:
        is_ap[root] = True
    return is_ap, clock, n_active


@njit(cache=True)
def candidates(indptr, indices, in_set):
    """Vertices outside the set that pass the articulation/orphan filter.

    Returns ``(mask, ok)``; ``ok`` is False when the complement is
    disconnected (the set is not a WCS and no candidates are defined).
    """
    n = in_set.shape[0]
    free = ~in_set
    is_ap, reached, n_free = articulation_points(indptr, indices, free)
    cand = free & ~is_ap
    if reached != n_free:
        cand[:] = False
        return cand, False
    for v in range(n):
        if not in_set[v]:
            continue
        count = 0
        last = -1
        for k in range(indptr[v], indptr[v + 1]):
            w = indices[k]
            if free[w]:
                count += 1
                last = w
        if count == 0:
            # an enclosed member: nothing outside can reach it any more
            cand[:] = False
            return cand, True
        if count == 1:
            cand[last] = False
    return cand, True


@njit(cache=True)
def per_average(indptr, indices, in_set):
    """Mean over every reference vertex of sum(d) / sum(d_w) to the members.

    A reference that cannot reach some member by a well-connected path
    contributes 0; -1.0 is returned if that happens for a member reference.
    """
    n = in_set.shape[0]
    everything = np.ones(n, np.bool_)
    free = ~in_set
    total = 0.0
    for u in range(n):
        d = bfs(indptr, indices, everything, everything, u)
        dw = bfs(indptr, indices, everything, free, u)
        num = 0
        den = 0
        cut_off = False
        for v in range(n):
            if in_set[v]:
                if dw[v] < 0:
                    cut_off = True
                    break
                num += d[v]
                den += dw[v]
        if cut_off:
            if in_set[u]:
                return -1.0
            continue
        total += 1.0 if den == 0 else num / den
    return total / n


@njit(cache=True)
def eccentricity_max(indptr, indices):
    n = indptr.shape[0] - 1
    everything = np.ones(n, np.bool_)
    best = 0
    for u in range(n):
        d = bfs(indptr, indices, everything, everything, u)
        m = d.max()
        if m > best:
            best = m
    return best


@njit(cache=True)
def distance_sums(indptr, indices):
    n = indptr.shape[0] - 1
    everything = np.ones(n, np.bool_)
    out = np.zeros(n, np.int64)
    for u in range(n):
        out[u] = bfs(indptr, indices, everything, everything, u).sum()
    return out
