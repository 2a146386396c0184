# Compiled inner loops for the lower-level solvers.  Costs are float64 with
# inf for absent edges; `allowed` masks nodes out when pinning selections.
import numpy as np
from numba import njit


@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def mst_kernel(cost, sel):
    """Kruskal over the subgraph induced by `sel`.

    Returns (total, eu, ev, k): the first k entries of eu/ev are tree edges
    as node ids.  total is inf when the finite edges do not connect `sel`.
    """
    m = sel.shape[0]
    cap = m * (m - 1) // 2
    w = np.empty(cap)
    a = np.empty(cap, np.int64)
    b = np.empty(cap, np.int64)
    k = 0
    for i in range(m):
        for j in range(i + 1, m):
            c = cost[sel[i], sel[j]]
            if c < np.inf:
                w[k] = c
                a[k] = i
                b[k] = j
                k += 1
    idx = np.argsort(w[:k], kind="mergesort")
    parent = np.arange(m)
    eu = np.empty(max(m - 1, 0), np.int64)
    ev = np.empty(max(m - 1, 0), np.int64)
    total = 0.0
    used = 0
    for t in range(k):
        e = idx[t]
        ra = _find(parent, a[e])
        rb = _find(parent, b[e])
        if ra != rb:
            parent[ra] = rb
            eu[used] = sel[a[e]]
            ev[used] = sel[b[e]]
            total += w[e]
            used += 1
            if used == m - 1:
                break
    if used < m - 1:
        return np.inf, eu, ev, 0
    return total, eu, ev, used


@njit(cache=True)
def tree_kernel(cost, members, offsets, allowed, bfs_order, parent):
    """Rooted-tree DP: best[v] is the cheapest realization of the subtree
    below v's cluster given v is chosen there.  Returns the optimum at the
    root cluster bfs_order[0]."""
    n = members.shape[0]
    best = np.zeros(n)
    for v in range(n):
        if not allowed[v]:
            best[v] = np.inf
    for t in range(bfs_order.shape[0] - 1, 0, -1):
        j = bfs_order[t]
        p = parent[j]
        for a in range(offsets[p], offsets[p + 1]):
            v = members[a]
            lo = np.inf
            for b in range(offsets[j], offsets[j + 1]):
                u = members[b]
                c = best[u] + cost[v, u]
                if c < lo:
                    lo = c
            best[v] += lo
    root = bfs_order[0]
    out = np.inf
    for a in range(offsets[root], offsets[root + 1]):
        if best[members[a]] < out:
            out = best[members[a]]
    return out


@njit(cache=True)
def tour_kernel(cost, members, offsets, allowed, tour):
    """Layered shortest closed walk through the clusters in `tour` order.

    The walk starts and ends at the same node of the smallest cluster, so the
    outer loop runs over as few start nodes as possible.
    """
    m = tour.shape[0]
    n = members.shape[0]
    shift = 0
    for t in range(1, m):
        k = tour[t]
        if offsets[k + 1] - offsets[k] < offsets[tour[shift] + 1] - offsets[tour[shift]]:
            shift = t
    order = np.empty(m, np.int64)
    for t in range(m):
        order[t] = tour[(shift + t) % m]
    dist = np.empty(n)
    first = order[0]
    out = np.inf
    for a in range(offsets[first], offsets[first + 1]):
        s = members[a]
        if not allowed[s]:
            continue
        prev = first
        for t in range(1, m):
            k = order[t]
            for b in range(offsets[k], offsets[k + 1]):
                u = members[b]
                lo = np.inf
                if allowed[u]:
                    if t == 1:
                        lo = cost[s, u]
                    else:
                        for c_ in range(offsets[prev], offsets[prev + 1]):
                            x = members[c_]
                            c = dist[x] + cost[x, u]
                            if c < lo:
                                lo = c
                dist[u] = lo
            prev = k
        closing = np.inf
        for b in range(offsets[prev], offsets[prev + 1]):
            x = members[b]
            c = dist[x] + cost[x, s]
            if c < closing:
                closing = c
        if closing < out:
            out = closing
    return out
