# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: dense Prim, neighbour-list Prim, branch and bound.

Function signatures and results match ``palab._core_py`` exactly.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()

BACKEND = "cython"


cdef inline bint _pair_less(long a1, long b1, long a2, long b2) noexcept nogil:
    return a1 < a2 or (a1 == a2 and b1 < b2)


def prim_dense(points):
    cdef const double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0], d = pts.shape[1]
    cdef Py_ssize_t m = n - 1 if n > 1 else 0
    a_arr = np.empty(m, dtype=np.int64)
    b_arr = np.empty(m, dtype=np.int64)
    w_arr = np.empty(m, dtype=np.float64)
    if n <= 1:
        return a_arr, b_arr, w_arr
    cdef long long[::1] a_out = a_arr
    cdef long long[::1] b_out = b_arr
    cdef double[::1] w_out = w_arr
    cdef double[::1] key = np.full(n, np.inf)
    cdef long long[::1] parent = np.full(n, -1, dtype=np.int64)
    cdef unsigned char[::1] in_tree = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t step, v, k, u = 0, best
    cdef double dist, t, bk
    cdef long lo, hi, plo, phi, blo, bhi
    in_tree[0] = 1
    with nogil:
        for step in range(n - 1):
            for v in range(n):
                if in_tree[v]:
                    continue
                dist = 0.0
                for k in range(d):
                    t = pts[v, k] - pts[u, k]
                    dist += t * t
                dist = sqrt(dist)
                lo = u if u < v else v
                hi = v if u < v else u
                if dist < key[v]:
                    key[v] = dist
                    parent[v] = u
                elif dist == key[v]:
                    plo = parent[v] if parent[v] < v else v
                    phi = v if parent[v] < v else parent[v]
                    if _pair_less(lo, hi, plo, phi):
                        parent[v] = u
            best = -1
            bk = INFINITY
            blo = 0
            bhi = 0
            for v in range(n):
                if in_tree[v]:
                    continue
                plo = parent[v] if parent[v] < v else v
                phi = v if parent[v] < v else parent[v]
                if best < 0 or key[v] < bk or (key[v] == bk and _pair_less(plo, phi, blo, bhi)):
                    best = v
                    bk = key[v]
                    blo = plo
                    bhi = phi
            in_tree[best] = 1
            a_out[step] = blo
            b_out[step] = bhi
            w_out[step] = bk
            u = best
    return a_arr, b_arr, w_arr


# --- binary heap of (w, a, b, u, v) for neighbour-list Prim -----------------

cdef struct HEntry:
    double w
    long a
    long b
    long u
    long v


cdef inline bint _hless(HEntry* x, HEntry* y) noexcept nogil:
    if x.w != y.w:
        return x.w < y.w
    if x.a != y.a:
        return x.a < y.a
    if x.b != y.b:
        return x.b < y.b
    if x.u != y.u:
        return x.u < y.u
    return x.v < y.v


cdef class _Heap:
    cdef HEntry* data
    cdef Py_ssize_t size, cap

    def __cinit__(self, Py_ssize_t cap):
        self.cap = cap if cap > 16 else 16
        self.size = 0
        self.data = <HEntry*> malloc(self.cap * sizeof(HEntry))
        if self.data == NULL:
            raise MemoryError()

    def __dealloc__(self):
        free(self.data)

    cdef void push(self, double w, long a, long b, long u, long v) except *:
        cdef HEntry* nd
        cdef Py_ssize_t i, j
        cdef HEntry e
        if self.size == self.cap:
            nd = <HEntry*> malloc(2 * self.cap * sizeof(HEntry))
            if nd == NULL:
                raise MemoryError()
            for i in range(self.size):
                nd[i] = self.data[i]
            free(self.data)
            self.data = nd
            self.cap *= 2
        e.w = w; e.a = a; e.b = b; e.u = u; e.v = v
        i = self.size
        self.size += 1
        while i > 0:
            j = (i - 1) // 2
            if _hless(&e, &self.data[j]):
                self.data[i] = self.data[j]
                i = j
            else:
                break
        self.data[i] = e

    cdef HEntry pop(self):
        cdef HEntry top = self.data[0]
        cdef HEntry last
        cdef Py_ssize_t i = 0, c
        self.size -= 1
        if self.size > 0:
            last = self.data[self.size]
            while True:
                c = 2 * i + 1
                if c >= self.size:
                    break
                if c + 1 < self.size and _hless(&self.data[c + 1], &self.data[c]):
                    c += 1
                if _hless(&self.data[c], &last):
                    self.data[i] = self.data[c]
                    i = c
                else:
                    break
            self.data[i] = last
        return top


cdef class _Lists:
    """Per-node neighbour lists; base arrays plus Python-side overrides."""
    cdef const long long[:, ::1] base_i
    cdef const double[:, ::1] base_d
    cdef list over_i
    cdef list over_d
    cdef long long[::1] ptr
    cdef unsigned char[::1] in_tree
    cdef Py_ssize_t n, k0

    def __init__(self, nbr_idx, nbr_dist, Py_ssize_t n):
        self.base_i = np.ascontiguousarray(nbr_idx, dtype=np.int64)
        self.base_d = np.ascontiguousarray(nbr_dist, dtype=np.float64)
        self.n = n
        self.k0 = self.base_i.shape[1]
        self.over_i = [None] * n
        self.over_d = [None] * n
        self.ptr = np.zeros(n, dtype=np.int64)
        self.in_tree = np.zeros(n, dtype=np.uint8)

    cdef void push_next(self, long u, _Heap heap) except *:
        cdef long long[::1] li
        cdef double[::1] ld
        cdef Py_ssize_t k = self.ptr[u], length
        cdef long v
        if self.over_i[u] is None:
            length = self.k0
            while k < length and self.in_tree[self.base_i[u, k]]:
                k += 1
            self.ptr[u] = k
            if k < length:
                v = self.base_i[u, k]
                heap.push(self.base_d[u, k], u if u < v else v, v if u < v else u, u, v)
            elif length < self.n - 1:
                heap.push(self.base_d[u, length - 1] if length > 0 else 0.0, -1, u, u, -1)
        else:
            li = self.over_i[u]
            ld = self.over_d[u]
            length = li.shape[0]
            while k < length and self.in_tree[li[k]]:
                k += 1
            self.ptr[u] = k
            if k < length:
                v = li[k]
                heap.push(ld[k], u if u < v else v, v if u < v else u, u, v)
            elif length < self.n - 1:
                heap.push(ld[length - 1] if length > 0 else 0.0, -1, u, u, -1)

    cdef Py_ssize_t length(self, long u):
        if self.over_i[u] is None:
            return self.k0
        return len(self.over_i[u])


def prim_knn(points, nbr_idx, nbr_dist, requery, long skip=-1):
    cdef Py_ssize_t n = np.asarray(points).shape[0]
    cdef Py_ssize_t m = n - 1 - (1 if skip >= 0 else 0)
    if m < 0:
        m = 0
    a_arr = np.empty(m, dtype=np.int64)
    b_arr = np.empty(m, dtype=np.int64)
    w_arr = np.empty(m, dtype=np.float64)
    if m == 0:
        return a_arr, b_arr, w_arr
    cdef long long[::1] a_out = a_arr
    cdef long long[::1] b_out = b_arr
    cdef double[::1] w_out = w_arr
    cdef _Lists L = _Lists(nbr_idx, nbr_dist, n)
    cdef _Heap heap = _Heap(2 * n)
    cdef HEntry e
    cdef Py_ssize_t count = 0, k
    cdef long start = 1 if skip == 0 else 0
    if skip >= 0:
        L.in_tree[skip] = 1
    L.in_tree[start] = 1
    L.push_next(start, heap)
    while count < m:
        e = heap.pop()
        if e.v < 0:
            k = 4 * L.length(e.u)
            if k < 1:
                k = 1
            if k > n - 1:
                k = n - 1
            ni, nd = requery(e.u, k)
            L.over_i[e.u] = np.ascontiguousarray(ni, dtype=np.int64)
            L.over_d[e.u] = np.ascontiguousarray(nd, dtype=np.float64)
            L.ptr[e.u] = 0
            L.push_next(e.u, heap)
            continue
        if L.in_tree[e.v]:
            L.push_next(e.u, heap)
            continue
        L.in_tree[e.v] = 1
        a_out[count] = e.a
        b_out[count] = e.b
        w_out[count] = e.w
        count += 1
        L.push_next(e.u, heap)
        L.push_next(e.v, heap)
    return a_arr, b_arr, w_arr


# --- branch and bound ---------------------------------------------------------

cdef struct BnB:
    int n
    bint boundary
    double tol
    double slack
    double best
    bint have_best
    long long nodes
    double* W
    double* levels
    int L
    int* counts
    int* order
    double* bd
    double* psi
    double* best_vec
    double* suffix
    int* parent
    bint* ok


cdef inline bint _covers(BnB* s, int i, double w) noexcept nogil:
    return s.psi[i] < 0 or s.psi[i] + s.slack >= w


cdef inline int _find(int* parent, int x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


cdef bint _feasible(BnB* s) noexcept nogil:
    cdef int n = s.n, i, j, ri, rj, comps = s.n
    cdef double w
    for i in range(n):
        s.parent[i] = i
    for i in range(n):
        for j in range(i + 1, n):
            w = s.W[i * n + j]
            if _covers(s, i, w) and _covers(s, j, w):
                ri = _find(s.parent, i)
                rj = _find(s.parent, j)
                if ri != rj:
                    s.parent[ri] = rj
                    comps -= 1
    if comps == 1:
        return True
    if not s.boundary:
        return False
    for i in range(n):
        s.ok[i] = False
    for i in range(n):
        if _covers(s, i, s.bd[i]):
            s.ok[_find(s.parent, i)] = True
    for i in range(n):
        if not s.ok[_find(s.parent, i)]:
            return False
    return True


cdef double _dynamic_rest(BnB* s, int depth) noexcept nogil:
    cdef double total = 0.0, best, w
    cdef int k, u, x, n = s.n
    for k in range(depth, n):
        u = s.order[k]
        best = s.bd[u] if s.boundary else INFINITY
        if n == 1:
            best = 0.0
        for x in range(n):
            if x == u:
                continue
            w = s.W[u * n + x]
            if w < best and _covers(s, x, w):
                best = w
        total += best
    return total


cdef bint _better(BnB* s, double val) noexcept nogil:
    cdef int i
    if not s.have_best or val < s.best - s.tol:
        return True
    if val <= s.best + s.tol:
        for i in range(s.n):
            if s.psi[i] < s.best_vec[i]:
                return True
            if s.psi[i] > s.best_vec[i]:
                return False
    return False


cdef void _run(BnB* s, int depth, double cur) noexcept nogil:
    cdef int v, li, i
    cdef double lvl
    s.nodes += 1
    if depth == s.n:
        if _better(s, cur):
            if not s.have_best or cur < s.best:
                s.best = cur
            s.have_best = True
            for i in range(s.n):
                s.best_vec[i] = s.psi[i]
        return
    v = s.order[depth]
    for li in range(s.counts[v]):
        lvl = s.levels[v * s.L + li]
        if cur + lvl + s.suffix[depth + 1] > s.best + s.tol:
            break
        s.psi[v] = lvl
        if cur + lvl + _dynamic_rest(s, depth + 1) > s.best + s.tol:
            continue
        if not _feasible(s):
            continue
        _run(s, depth + 1, cur + lvl)
    s.psi[v] = -1.0


def bnb_solve(W, levels, counts, order, bd, boundary, double ub, double tol, double slack):
    cdef double[:, ::1] Wv = np.ascontiguousarray(W, dtype=np.float64)
    cdef double[:, ::1] Lv = np.ascontiguousarray(levels, dtype=np.float64)
    cdef int[::1] cv = np.ascontiguousarray(counts, dtype=np.intc)
    cdef int[::1] ov = np.ascontiguousarray(order, dtype=np.intc)
    cdef int n = Wv.shape[0], k
    bd_arr = np.zeros(n) if not boundary else np.ascontiguousarray(bd, dtype=np.float64)
    cdef double[::1] bdv = bd_arr
    psi_arr = np.full(n, -1.0)
    best_arr = np.zeros(n)
    suffix_arr = np.zeros(n + 1)
    parent_arr = np.zeros(n, dtype=np.intc)
    ok_arr = np.zeros(n, dtype=np.intc)
    cdef double[::1] psiv = psi_arr
    cdef double[::1] bestv = best_arr
    cdef double[::1] sufv = suffix_arr
    cdef int[::1] parv = parent_arr
    cdef int[::1] okv = ok_arr
    cdef BnB s
    for k in range(n - 1, -1, -1):
        sufv[k] = sufv[k + 1] + Lv[ov[k], 0]
    s.n = n
    s.boundary = bool(boundary)
    s.tol = tol
    s.slack = slack
    s.best = ub
    s.have_best = False
    s.nodes = 0
    s.W = &Wv[0, 0]
    s.levels = &Lv[0, 0]
    s.L = Lv.shape[1]
    s.counts = &cv[0]
    s.order = &ov[0]
    s.bd = &bdv[0]
    s.psi = &psiv[0]
    s.best_vec = &bestv[0]
    s.suffix = &sufv[0]
    s.parent = &parv[0]
    s.ok = <bint*> &okv[0]
    with nogil:
        _run(&s, 0, 0.0)
    if not s.have_best:
        return None, s.nodes
    return best_arr, s.nodes
