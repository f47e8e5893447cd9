"""Spanning trees, induced power assignments and the MST heuristic."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from . import kernels
from .errors import InputError
from .geometry import SLACK, TOL, Params, pairwise_powered

#: largest n handled by the dense O(n^2) Prim
DENSE_MAX = 2048
#: neighbour-list length for the sparse Prim
KNN_K = 16


class Instance:
    """An immutable point set in ``[0,1]^d`` with its parameters."""

    __slots__ = ("params", "points")

    def __init__(self, params: Params, points):
        pts = np.array(points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if params.d == 1 else pts.reshape(1, -1)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise InputError("an instance needs at least one point")
        if pts.shape[1] != params.d:
            raise InputError(f"points have dimension {pts.shape[1]}, expected d={params.d}")
        if not np.all(np.isfinite(pts)):
            raise InputError("coordinates must be finite")
        if np.any(pts < 0.0) or np.any(pts > 1.0):
            raise InputError("coordinates must lie in [0, 1]")
        pts.setflags(write=False)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "points", pts)

    def __setattr__(self, name, value):
        raise AttributeError("Instance is immutable")

    @classmethod
    def from_points(cls, points, p: float, d: int | None = None) -> "Instance":
        pts = np.asarray(points, dtype=np.float64)
        if d is None:
            d = 1 if pts.ndim == 1 else pts.shape[1]
        return cls(Params(d, p), pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.params.d

    @property
    def p(self) -> float:
        return self.params.p

    def subset(self, idx) -> "Instance":
        return Instance(self.params, self.points[np.asarray(idx, dtype=int)])

    def weights(self) -> np.ndarray:
        """Dense matrix of powered pairwise distances."""
        return pairwise_powered(self.points, self.p)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return self.params == other.params and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash((self.params, self.points.tobytes()))

    def __repr__(self):
        return f"Instance(n={self.n}, d={self.d}, p={self.p})"


@dataclass(frozen=True)
class MstSummary:
    edges: np.ndarray  # (n-1, 2) index pairs, i < j, lexicographically sorted
    weights: np.ndarray  # powered edge weights aligned with ``edges``
    lengths: np.ndarray  # Euclidean edge lengths
    total: float
    longest_edge: float
    max_degree: int
    heavy: float
    light: float

    @property
    def n_edges(self) -> int:
        return len(self.weights)

    def heaviest_sum(self, k: int) -> float:
        """Sum of the ``k`` heaviest powered edge weights."""
        return float(np.sum(_heavy_order(self.edges, self.weights)[:k]))

    def edge_list(self) -> list[tuple[tuple[int, int], float]]:
        return [((int(a), int(b)), float(w)) for (a, b), w in zip(self.edges, self.weights)]


@dataclass(frozen=True)
class PaSolution:
    powers: np.ndarray
    value: float
    connected: bool
    meta: dict = field(default_factory=dict, compare=False)


def _heavy_order(edges, weights) -> np.ndarray:
    """Weights sorted heaviest first, ties broken by smaller edge index pair."""
    if len(weights) == 0:
        return np.asarray(weights)
    order = np.lexsort((edges[:, 1], edges[:, 0], -weights))
    return weights[order]


def _tie_sort(idx: np.ndarray, dist: np.ndarray):
    """Order equal distances by index so neighbour lists are canonical."""
    ties = np.any(dist[:, 1:] == dist[:, :-1], axis=1)
    if ties.any():
        rows = np.flatnonzero(ties)
        o = np.lexsort((idx[rows], dist[rows]), axis=-1)
        idx[rows] = np.take_along_axis(idx[rows], o, axis=1)
        dist[rows] = np.take_along_axis(dist[rows], o, axis=1)
    return idx, dist


def _knn_lists(tree: cKDTree, points: np.ndarray, k: int):
    """Per-node neighbour lists of length ``k`` (self excluded), sorted by (distance, index)."""
    n = points.shape[0]
    dist, idx = tree.query(points, k=k + 1)
    own = np.arange(n)
    is_self = idx == own[:, None]
    # drop one self entry per row; coincident twins may precede it
    drop = np.where(is_self.any(axis=1), np.argmax(is_self, axis=1), k)
    keep = np.ones_like(is_self)
    keep[own, drop] = False
    idx = idx[keep].reshape(n, k).astype(np.int64)
    dist = dist[keep].reshape(n, k)
    return _tie_sort(idx, dist)


def _requery(tree: cKDTree, points: np.ndarray, u: int, k: int):
    dist, idx = tree.query(points[u], k=k + 1)
    keep = idx != u
    idx, dist = idx[keep][:k], dist[keep][:k]
    o = np.lexsort((idx, dist))
    return idx[o].astype(np.int64), dist[o]


def _path_mst(points: np.ndarray):
    order = np.argsort(points[:, 0], kind="stable")
    a, b = order[:-1], order[1:]
    return np.minimum(a, b), np.maximum(a, b), np.diff(points[order, 0])


def mst_edges(points: np.ndarray, backend=None) -> tuple[np.ndarray, np.ndarray]:
    """Euclidean MST as ``(edges (m,2), lengths (m,))``."""
    impl = backend or kernels
    n, d = points.shape
    if n <= DENSE_MAX:
        a, b, w = impl.prim_dense(points)
    elif d == 1:
        a, b, w = _path_mst(points)
    else:
        tree = cKDTree(points)
        idx, dist = _knn_lists(tree, points, min(KNN_K, n - 1))
        a, b, w = impl.prim_knn(points, idx, dist, lambda u, k: _requery(tree, points, u, k))
    return np.stack([a, b], axis=1), w


class ReplacementWorkspace:
    """MST of a point set with one point swapped, reusing one kd-tree.

    Neighbour lists of the original set are patched for each swap: the removed
    point is skipped by the search and the new point is merged into every list
    it belongs to. Exactness is preserved by the kernel's requery fallback.
    """

    def __init__(self, points: np.ndarray, backend=None):
        self.points = np.ascontiguousarray(points, dtype=np.float64)
        self.n = self.points.shape[0]
        self.impl = backend or kernels
        self.k = min(KNN_K, self.n - 1)
        self.tree = cKDTree(self.points)
        self.idx, self.dist = _knn_lists(self.tree, self.points, self.k)
        self._wide = {}  # (u, k) -> wider neighbour list of the original set

    @staticmethod
    def _merge_q(idx, dist, dq, qi):
        pos = int(np.searchsorted(dist, dq, side="right"))
        return (np.concatenate([idx[:pos], [qi], idx[pos:]]),
                np.concatenate([dist[:pos], [dq], dist[pos:]]))

    def _wide_list(self, u, kk):
        hit = self._wide.get((u, kk))
        if hit is None:
            hit = _requery(self.tree, self.points, u, min(kk, self.n - 1))
            self._wide[(u, kk)] = hit
        return hit

    def edges(self, victim: int, q) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """MST edges ``(edges, lengths)`` of the swapped set, indices into the returned points."""
        n, k = self.n, self.k
        q = np.asarray(q, dtype=np.float64)
        pts = np.vstack([self.points, q[None, :]])
        qi = n
        dq = np.sqrt(((self.points - q) ** 2).sum(axis=1))
        idx = np.hstack([self.idx, np.full((n, 1), victim, dtype=np.int64)])
        dist = np.hstack([self.dist, self.dist[:, -1:]])
        rows = np.flatnonzero(dq < self.dist[:, -1])
        for u in rows:
            if u == victim:
                continue
            ii, dd = self._merge_q(self.idx[u], self.dist[u], dq[u], qi)
            idx[u], dist[u] = ii[: k + 1], dd[: k + 1]
        qd, qidx = self.tree.query(q, k=min(k + 1, n))
        qd, qidx = np.atleast_1d(qd), np.atleast_1d(qidx).astype(np.int64)
        o = np.lexsort((qidx, qd))
        qidx, qd = qidx[o], qd[o]
        if len(qidx) < k + 1:
            qidx = np.append(qidx, [victim] * (k + 1 - len(qidx)))
            qd = np.append(qd, [qd[-1]] * (k + 1 - len(qd)))
        idx = np.vstack([idx, qidx[None, :]])
        dist = np.vstack([dist, qd[None, :]])

        def requery(u, kk):
            if u == qi:
                dd, ii = self.tree.query(q, k=min(kk, n))
                ii, dd = np.atleast_1d(ii), np.atleast_1d(dd)
                o = np.lexsort((ii, dd))
                return ii[o][:kk].astype(np.int64), dd[o][:kk]
            ii, dd = self._wide_list(u, kk)
            ii, dd = self._merge_q(ii, dd, dq[u], qi)
            return ii[:kk], dd[:kk]

        a, b, w = self.impl.prim_knn(pts, idx, dist, requery, victim)
        return pts, np.stack([a, b], axis=1), w

    def totals(self, victim: int, q, p: float) -> tuple[float, float]:
        """``(MST, PT)`` of the set with ``points[victim]`` replaced by ``q``."""
        pts, e, w = self.edges(victim, q)
        wp = w**p
        psi = np.zeros(len(pts))
        np.maximum.at(psi, e[:, 0], wp)
        np.maximum.at(psi, e[:, 1], wp)
        return float(np.sum(wp)), float(psi.sum())


def build_mst(inst: Instance, backend=None) -> MstSummary:
    """Minimum spanning tree with powered weights; deterministic on ties."""
    n = inst.n
    edges, lengths = mst_edges(inst.points, backend)
    if len(lengths):
        order = np.lexsort((edges[:, 1], edges[:, 0]))
        edges = edges[order]
        lengths = lengths[order]
    else:
        edges = edges.reshape(0, 2)
    weights = lengths**inst.p
    total = float(np.sum(weights))
    deg = np.bincount(edges.ravel(), minlength=n) if len(lengths) else np.zeros(n, dtype=int)
    n_heavy = math.ceil((n - 1) / 2)
    heavy = float(np.sum(_heavy_order(edges, weights)[:n_heavy]))
    return MstSummary(
        edges=edges,
        weights=weights,
        lengths=lengths,
        total=total,
        longest_edge=float(lengths.max()) if len(lengths) else 0.0,
        max_degree=int(deg.max()) if n else 0,
        heavy=heavy,
        light=total - heavy,
    )


def induced_power(inst: Instance, edges) -> np.ndarray:
    """Each node's power is the largest powered length among its edges."""
    psi = np.zeros(inst.n)
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if len(e) == 0:
        return psi
    if e.min() < 0 or e.max() >= inst.n:
        raise InputError("edge references an invalid node index")
    w = np.linalg.norm(inst.points[e[:, 0]] - inst.points[e[:, 1]], axis=1) ** inst.p
    np.maximum.at(psi, e[:, 0], w)
    np.maximum.at(psi, e[:, 1], w)
    return psi


def _check_powers(inst: Instance, psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=np.float64)
    if psi.shape != (inst.n,):
        raise InputError(f"expected {inst.n} powers, got shape {psi.shape}")
    if not np.all(np.isfinite(psi)) or np.any(psi < 0):
        raise InputError("powers must be finite and non-negative")
    return psi


def _induced_pairs(inst: Instance, psi: np.ndarray) -> np.ndarray:
    n = inst.n
    if n <= DENSE_MAX:
        W = inst.weights()
        ok = (psi[:, None] + SLACK >= W) & (psi[None, :] + SLACK >= W)
        i, j = np.nonzero(np.triu(ok, 1))
        return np.stack([i, j], axis=1)
    reach = float(psi.max() + SLACK) ** (1.0 / inst.p)
    pairs = cKDTree(inst.points).query_pairs(reach, output_type="ndarray")
    if len(pairs) == 0:
        return pairs.reshape(0, 2)
    w = np.linalg.norm(inst.points[pairs[:, 0]] - inst.points[pairs[:, 1]], axis=1) ** inst.p
    keep = (psi[pairs[:, 0]] + SLACK >= w) & (psi[pairs[:, 1]] + SLACK >= w)
    pairs = np.sort(pairs[keep], axis=1)
    return pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]


def induced_graph(inst: Instance, psi) -> list[tuple[int, int]]:
    """Edges ``(i, j)``, ``i < j``, such that both endpoints cover the edge."""
    psi = _check_powers(inst, psi)
    return [(int(a), int(b)) for a, b in _induced_pairs(inst, psi)]


def component_labels(n: int, pairs: np.ndarray) -> tuple[int, np.ndarray]:
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    g = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    return connected_components(g, directed=False)


def is_connected_pa(inst: Instance, psi) -> bool:
    psi = _check_powers(inst, psi)
    if inst.n == 1:
        return True
    ncomp, _ = component_labels(inst.n, _induced_pairs(inst, psi))
    return ncomp == 1


def pt_heuristic(inst: Instance, mst: MstSummary | None = None) -> PaSolution:
    """Power each node with its longest incident MST edge."""
    mst = mst or build_mst(inst)
    psi = induced_power(inst, mst.edges)
    return PaSolution(powers=psi, value=float(psi.sum()), connected=True)


def sandwich_check(inst: Instance, pa_value: float, mst: MstSummary | None = None) -> bool:
    """``MST <= PA <= PT <= 2 MST`` within the solver tolerance."""
    mst = mst or build_mst(inst)
    pt = pt_heuristic(inst, mst).value
    m = mst.total
    return bool(m <= pa_value + TOL and pa_value <= pt + TOL and pt <= 2 * m + TOL)
