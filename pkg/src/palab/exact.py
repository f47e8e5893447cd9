"""Exact optimal power assignments for small instances.

An optimal assignment is induced by its own graph, so every node's optimal
power is one of its powered distances to another node (or, in the boundary
variant, its powered distance to the rectangle's boundary). Both solvers
search over these discrete candidate levels.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import CapacityError, InputError
from .geometry import SLACK, TOL, HyperRect, boundary_distances
from .graphs import Instance, PaSolution, pt_heuristic

DEFAULT_BUDGET = 12
ORACLE_MAX = 7

INTERIOR = "interior"
BOUNDARY = "boundary"


@dataclass(frozen=True)
class CandidateLevels:
    mode: str
    levels: tuple  # one strictly ascending float array per node

    def padded(self) -> tuple[np.ndarray, np.ndarray]:
        counts = np.array([len(lv) for lv in self.levels], dtype=np.intc)
        out = np.full((len(self.levels), max(counts.max(), 1)), np.inf)
        for i, lv in enumerate(self.levels):
            out[i, : len(lv)] = lv
        return out, counts


@dataclass(frozen=True)
class BoundarySolution:
    powers: np.ndarray
    value: float
    boundary_links: frozenset
    meta: dict = field(default_factory=dict, compare=False)


def _resolve_rect(inst: Instance, r: HyperRect | None) -> HyperRect:
    r = r if r is not None else HyperRect.unit(inst.d)
    if r.dim != inst.d:
        raise InputError(f"rectangle dimension {r.dim} != instance dimension {inst.d}")
    return r


def _levels_from(W: np.ndarray, bd_p: np.ndarray | None) -> tuple:
    n = W.shape[0]
    out = []
    for v in range(n):
        vals = np.delete(W[v], v)
        if n == 1:
            vals = np.array([0.0])
        if bd_p is not None:
            vals = np.append(vals, bd_p[v])
        out.append(np.unique(vals))
    return tuple(out)


def candidate_levels(inst: Instance, mode: str = INTERIOR, r: HyperRect | None = None) -> CandidateLevels:
    if mode == INTERIOR:
        return CandidateLevels(mode, _levels_from(inst.weights(), None))
    if mode != BOUNDARY:
        raise InputError(f"unknown mode {mode!r}")
    if r is None:
        raise InputError("boundary mode requires a rectangle")
    bd_p = boundary_distances(inst.points, r) ** inst.p
    return CandidateLevels(mode, _levels_from(inst.weights(), bd_p))


def _check_budget(n: int, budget: int, what: str):
    if n > budget:
        raise CapacityError(
            f"{what} refuses n={n} points: the exact budget is {budget} "
            f"(raise it explicitly to search anyway)",
            budget=budget,
        )


def _search_order(W: np.ndarray) -> np.ndarray:
    n = W.shape[0]
    if n == 1:
        return np.zeros(1, dtype=np.intc)
    nn = np.where(np.eye(n, dtype=bool), np.inf, W).min(axis=1)
    # hardest-to-connect first; stable on index
    return np.lexsort((np.arange(n), -nn)).astype(np.intc)


def _solve(inst: Instance, bd_p: np.ndarray | None, ub: float, backend=None):
    impl = backend or kernels
    W = inst.weights()
    levels, counts = CandidateLevels("", _levels_from(W, bd_p)).padded()
    boundary = bd_p is not None
    bd = bd_p if boundary else np.zeros(inst.n)
    psi, nodes = impl.bnb_solve(W, levels, counts, _search_order(W), bd, boundary, ub + TOL, TOL, SLACK)
    if psi is None:  # cannot happen: ub is always achievable
        raise RuntimeError("branch and bound found no feasible assignment")
    return psi, nodes


def exact_pa(inst: Instance, budget: int = DEFAULT_BUDGET, backend=None) -> PaSolution:
    """Globally optimal connected power assignment by branch and bound."""
    _check_budget(inst.n, budget, "exact_pa")
    ub = pt_heuristic(inst).value
    psi, nodes = _solve(inst, None, ub, backend)
    return PaSolution(powers=psi, value=float(psi.sum()), connected=True, meta={"nodes": int(nodes)})


def exact_pa_boundary(inst: Instance, r: HyperRect | None = None, budget: int = DEFAULT_BUDGET,
                      backend=None) -> BoundarySolution:
    """Optimal boundary assignment: components may attach to the rectangle's boundary for free."""
    r = _resolve_rect(inst, r)
    bd_p = boundary_distances(inst.points, r) ** inst.p
    _check_budget(inst.n, budget, "exact_pa_boundary")
    ub = min(pt_heuristic(inst).value, float(bd_p.sum()))
    psi, nodes = _solve(inst, bd_p, ub, backend)
    links = frozenset(int(i) for i in np.flatnonzero(psi + SLACK >= bd_p))
    return BoundarySolution(powers=psi, value=float(psi.sum()), boundary_links=links,
                            meta={"nodes": int(nodes)})


def boundary_feasible(inst: Instance, psi, r: HyperRect) -> bool:
    """True iff ``psi`` induces a boundary PA graph for ``(inst, r)``."""
    from .graphs import _induced_pairs, component_labels

    psi = np.asarray(psi, dtype=np.float64)
    ncomp, labels = component_labels(inst.n, _induced_pairs(inst, psi))
    if ncomp == 1:
        return True
    bd_p = boundary_distances(inst.points, r) ** inst.p
    attached = np.zeros(ncomp, dtype=bool)
    attached[labels[psi + SLACK >= bd_p]] = True
    return bool(attached.all())


# --- brute-force oracle ------------------------------------------------------

def _feasible_batch(psi: np.ndarray, W: np.ndarray, bd_p: np.ndarray | None) -> np.ndarray:
    """Vectorised feasibility of a batch ``(c, n)`` of power vectors."""
    c, n = psi.shape
    cover = psi[:, :, None] + SLACK >= W[None]
    adj = cover & np.transpose(cover, (0, 2, 1))
    reach = (adj | np.eye(n, dtype=bool)[None]).astype(np.float32)
    for _ in range(max(1, int(np.ceil(np.log2(max(n, 2)))))):
        reach = (np.matmul(reach, reach) > 0).astype(np.float32)
    conn = reach[:, 0, :].all(axis=1) > 0
    if bd_p is None:
        return conn
    attach = (psi + SLACK >= bd_p[None]).astype(np.float32)
    every_comp = (np.einsum("cij,cj->ci", reach, attach) > 0).all(axis=1)
    return conn | every_comp


def oracle_enumerate(inst: Instance, mode: str = INTERIOR, r: HyperRect | None = None,
                     chunk: int = 8192):
    """Exhaustive search over the Cartesian product of candidate levels.

    Every tuple's total is computed; tuples are then tested for feasibility in
    ascending (total, power vector) order and the first feasible one wins.
    """
    if inst.n > ORACLE_MAX:
        raise CapacityError(f"oracle_enumerate is limited to n <= {ORACLE_MAX}, got n={inst.n}",
                            budget=ORACLE_MAX)
    bd_p = None
    if mode == BOUNDARY:
        r = _resolve_rect(inst, r)
        bd_p = boundary_distances(inst.points, r) ** inst.p
    elif mode != INTERIOR:
        raise InputError(f"unknown mode {mode!r}")
    W = inst.weights()
    levels = _levels_from(W, bd_p)
    grids = np.meshgrid(*levels, indexing="ij")
    tuples = np.stack([g.ravel() for g in grids], axis=1)
    totals = tuples.sum(axis=1)
    order = np.lexsort(tuple(tuples[:, i] for i in range(inst.n - 1, -1, -1)) + (totals,))
    best = None
    for start in range(0, len(order), chunk):
        sel = order[start:start + chunk]
        if best is not None and totals[sel[0]] > totals[best] + TOL:
            break
        ok = _feasible_batch(tuples[sel], W, bd_p)
        for k in np.flatnonzero(ok):
            cand = sel[k]
            if best is None:
                best = cand
            elif totals[cand] <= totals[best] + TOL and tuple(tuples[cand]) < tuple(tuples[best]):
                best = cand
        if best is not None and totals[sel[-1]] > totals[best] + TOL:
            break
    psi = tuples[best].copy()
    value = float(psi.sum())
    if mode == BOUNDARY:
        links = frozenset(int(i) for i in np.flatnonzero(psi + SLACK >= bd_p))
        return BoundarySolution(powers=psi, value=value, boundary_links=links)
    return PaSolution(powers=psi, value=value, connected=True)


def lowering_certificate(inst: Instance, psi, mode: str = INTERIOR, r: HyperRect | None = None) -> bool:
    """True iff lowering any single node to its next lower level breaks feasibility."""
    from .graphs import is_connected_pa

    psi = np.asarray(psi, dtype=np.float64)
    cl = candidate_levels(inst, mode, _resolve_rect(inst, r) if mode == BOUNDARY else None)
    for v, lv in enumerate(cl.levels):
        pos = int(np.searchsorted(lv, psi[v] - SLACK))
        if pos == 0:
            continue
        trial = psi.copy()
        trial[v] = lv[pos - 1]
        if mode == INTERIOR:
            ok = is_connected_pa(inst, trial)
        else:
            ok = boundary_feasible(inst, trial, _resolve_rect(inst, r))
        if ok:
            return False
    return True


__all__ = [
    "BOUNDARY",
    "INTERIOR",
    "BoundarySolution",
    "CandidateLevels",
    "boundary_feasible",
    "candidate_levels",
    "exact_pa",
    "exact_pa_boundary",
    "lowering_certificate",
    "oracle_enumerate",
]
