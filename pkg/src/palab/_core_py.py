"""Pure-Python implementations of the hot kernels.

Mirrors ``palab._core`` (Cython) function for function; used when the
compiled module is unavailable or ``PALAB_PURE=1`` is set.
"""
from __future__ import annotations

import heapq

import numpy as np

BACKEND = "python"


def _pair(u, v):
    return (u, v) if u < v else (v, u)


def prim_dense(points):
    """O(n^2) Prim. Returns ``(a, b, length)`` arrays, edges in insertion order."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    n = pts.shape[0]
    a_out = np.empty(max(n - 1, 0), dtype=np.int64)
    b_out = np.empty(max(n - 1, 0), dtype=np.int64)
    w_out = np.empty(max(n - 1, 0), dtype=np.float64)
    if n <= 1:
        return a_out, b_out, w_out
    idx = np.arange(n)
    in_tree = np.zeros(n, dtype=bool)
    key = np.full(n, np.inf)
    parent = np.full(n, -1, dtype=np.int64)
    u = 0
    in_tree[0] = True
    for step in range(n - 1):
        d = np.sqrt(((pts - pts[u]) ** 2).sum(axis=1))
        lo = np.minimum(idx, u)
        hi = np.maximum(idx, u)
        plo = np.minimum(idx, parent)
        phi = np.maximum(idx, parent)
        better = (d < key) | ((d == key) & ((lo < plo) | ((lo == plo) & (hi < phi))))
        better &= ~in_tree
        key[better] = d[better]
        parent[better] = u
        masked = np.where(in_tree, np.inf, key)
        m = masked.min()
        cand = np.flatnonzero(masked == m)
        if cand.size > 1:
            cand = sorted(cand, key=lambda v: _pair(int(parent[v]), int(v)))
        v = int(cand[0])
        in_tree[v] = True
        a, b = _pair(int(parent[v]), v)
        a_out[step], b_out[step], w_out[step] = a, b, key[v]
        u = v
    return a_out, b_out, w_out


def prim_knn(points, nbr_idx, nbr_dist, requery, skip=-1):
    """Prim over per-node sorted neighbour lists.

    When every listed neighbour of a tree node is already in the tree, a
    placeholder keyed by its farthest listed distance (a lower bound on its
    nearest outside point) is queued; popping it calls ``requery(u, k)`` for a
    wider list. The result is therefore the exact minimum spanning tree.
    Node ``skip`` (if >= 0) is treated as absent.
    """
    pts = np.asarray(points)
    n = pts.shape[0]
    m = max(n - 1 - (skip >= 0), 0)
    a_out = np.empty(m, dtype=np.int64)
    b_out = np.empty(m, dtype=np.int64)
    w_out = np.empty(m, dtype=np.float64)
    if m == 0:
        return a_out, b_out, w_out
    lists_i = [None] * n
    lists_d = [None] * n
    base_i = np.asarray(nbr_idx).tolist()
    base_d = np.asarray(nbr_dist).tolist()
    ptr = [0] * n
    in_tree = [False] * n
    heap = []

    def push_next(u):
        li = lists_i[u] if lists_i[u] is not None else base_i[u]
        ld = lists_d[u] if lists_d[u] is not None else base_d[u]
        k = ptr[u]
        while k < len(li) and in_tree[li[k]]:
            k += 1
        ptr[u] = k
        if k < len(li):
            v = li[k]
            a, b = _pair(u, v)
            heapq.heappush(heap, (ld[k], a, b, u, v))
        elif len(li) < n - 1:
            heapq.heappush(heap, (ld[-1] if li else 0.0, -1, u, u, -1))

    start = 1 if skip == 0 else 0
    if skip >= 0:
        in_tree[skip] = True
    in_tree[start] = True
    push_next(start)
    count = 0
    while count < m:
        w, a, b, u, v = heapq.heappop(heap)
        if v < 0:
            cur = lists_i[u] if lists_i[u] is not None else base_i[u]
            k = min(n - 1, max(4 * len(cur), 1))
            ni, nd = requery(u, k)
            lists_i[u] = list(ni)
            lists_d[u] = list(nd)
            ptr[u] = 0
            push_next(u)
            continue
        if in_tree[v]:
            push_next(u)
            continue
        in_tree[v] = True
        a_out[count], b_out[count], w_out[count] = a, b, w
        count += 1
        push_next(u)
        push_next(v)
    return a_out, b_out, w_out


class _Search:
    def __init__(self, W, levels, counts, order, bd, boundary, ub, tol, slack):
        self.W = np.asarray(W, dtype=np.float64).tolist()
        self.n = len(self.W)
        self.levels = [list(np.asarray(levels)[i, : counts[i]]) for i in range(self.n)]
        self.order = [int(o) for o in order]
        self.bd = list(np.asarray(bd, dtype=np.float64)) if boundary else [0.0] * self.n
        self.boundary = bool(boundary)
        self.tol = tol
        self.slack = slack
        self.best = ub
        self.best_vec = None
        self.nodes = 0
        self.psi = [-1.0] * self.n
        mins = [lv[0] for lv in self.levels]
        self.suffix = [0.0] * (self.n + 1)
        for k in range(self.n - 1, -1, -1):
            self.suffix[k] = self.suffix[k + 1] + mins[self.order[k]]

    def _covers(self, i, w):
        s = self.psi[i]
        return s < 0 or s + self.slack >= w

    def _feasible(self):
        n = self.n
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        comps = n
        W = self.W
        for i in range(n):
            for j in range(i + 1, n):
                w = W[i][j]
                if self._covers(i, w) and self._covers(j, w):
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[ri] = rj
                        comps -= 1
        if comps == 1:
            return True
        if not self.boundary:
            return False
        ok = [False] * n
        for i in range(n):
            if self._covers(i, self.bd[i]):
                ok[find(i)] = True
        return all(ok[find(i)] for i in range(n))

    def _dynamic_rest(self, depth):
        total = 0.0
        W = self.W
        for k in range(depth, self.n):
            u = self.order[k]
            best = self.bd[u] if self.boundary else np.inf
            if self.n == 1:
                best = 0.0
            for x in range(self.n):
                if x == u:
                    continue
                w = W[u][x]
                if w < best and self._covers(x, w):
                    best = w
            total += best
        return total

    def _better(self, val):
        if self.best_vec is None or val < self.best - self.tol:
            return True
        if val <= self.best + self.tol:
            return self.psi < self.best_vec
        return False

    def run(self, depth=0, cur=0.0):
        self.nodes += 1
        if depth == self.n:
            if self._better(cur):
                self.best = min(self.best, cur) if self.best_vec is not None else cur
                self.best_vec = list(self.psi)
            return
        v = self.order[depth]
        for lvl in self.levels[v]:
            if cur + lvl + self.suffix[depth + 1] > self.best + self.tol:
                break
            self.psi[v] = lvl
            if cur + lvl + self._dynamic_rest(depth + 1) > self.best + self.tol:
                continue
            if not self._feasible():
                continue
            self.run(depth + 1, cur + lvl)
        self.psi[v] = -1.0


def bnb_solve(W, levels, counts, order, bd, boundary, ub, tol, slack):
    """Branch and bound over candidate power levels.

    ``levels`` is a padded ``(n, L)`` array whose row ``i`` holds ``counts[i]``
    ascending levels. Returns ``(powers or None, nodes_explored)``.
    """
    s = _Search(W, levels, counts, order, bd, boundary, ub, tol, slack)
    s.run()
    vec = None if s.best_vec is None else np.asarray(s.best_vec, dtype=np.float64)
    return vec, s.nodes
