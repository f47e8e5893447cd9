"""Even/odd charge decomposition of MST and PT on the line.

With sentinels ``x_0 = 0`` and ``x_{n+1} = 1`` around the sorted points, node
``i`` is charged ``M_i`` (half of each adjacent gap's power) for the tree and
``P_i`` (its larger adjacent gap's power) for the heuristic. The charges plus
the two boundary terms reproduce MST and PT of the point set *including* the
two sentinels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from ..graphs import Instance


@dataclass(frozen=True)
class OneDimDecomposition:
    M_star: float
    M_prime: float
    P_star: float
    P_prime: float
    M_even: float
    M_odd: float
    P_even: float
    P_odd: float
    intervals: np.ndarray  # x_{2i+1} - x_{2i-1} for every even index 2i <= n
    mst_sentinel: float  # MST of the points plus both sentinels
    pt_sentinel: float  # PT of the points plus both sentinels
    mst_points: float  # MST of the points alone
    pt_points: float  # PT of the points alone

    @property
    def ratio_star(self) -> float:
        return self.P_star / self.M_star if self.M_star > 0 else 1.0


def run_d1_decomposition(inst: Instance) -> OneDimDecomposition:
    if inst.d != 1:
        raise InputError(f"the line decomposition needs d = 1, got d = {inst.d}")
    p = inst.p
    x = np.concatenate([[0.0], np.sort(inst.points[:, 0]), [1.0]])
    n = inst.n
    gp = np.diff(x) ** p  # gp[i-1] is (x_i - x_{i-1})^p for i = 1..n+1
    M = 0.5 * (gp[:-1] + gp[1:])  # M[i-1] = M_i
    P = np.maximum(gp[:-1], gp[1:])
    idx = np.arange(1, n + 1)
    even = idx % 2 == 0
    m_even = math.fsum(M[even])
    m_odd = math.fsum(M[~even])
    p_even = math.fsum(P[even])
    p_odd = math.fsum(P[~even])
    inner = gp[1:-1]
    pad = np.zeros(1)
    pt_points = math.fsum(np.maximum(np.concatenate([pad, inner]), np.concatenate([inner, pad])))
    ev = idx[even]
    return OneDimDecomposition(
        # even + odd partitions are summed first so the identities hold exactly
        M_star=m_even + m_odd,
        M_prime=float(0.5 * (gp[0] + gp[-1])),
        P_star=p_even + p_odd,
        P_prime=float(gp[0] + gp[-1]),
        M_even=m_even,
        M_odd=m_odd,
        P_even=p_even,
        P_odd=p_odd,
        intervals=x[ev + 1] - x[ev - 1],
        mst_sentinel=math.fsum(gp),
        pt_sentinel=math.fsum(np.concatenate([P, gp[[0, -1]]])),
        mst_points=math.fsum(inner),
        pt_points=pt_points,
    )


def interval_expectations(ell: float, p: float) -> tuple[float, float]:
    """Closed-form means of ``M`` and ``P`` for one uniform point in an interval of length ``ell``."""
    em = ell**p / (p + 1)
    return em, (2 - 2.0**-p) * em


def interval_monte_carlo(ell: float, p: float, samples: int, rng: np.random.Generator) -> tuple[float, float]:
    """Sample means of ``M = (x^p + (ell-x)^p)/2`` and ``P = max(x, ell-x)^p``."""
    x = rng.random(samples) * ell
    a = x**p
    b = (ell - x) ** p
    return float(np.mean(0.5 * (a + b))), float(np.mean(np.maximum(a, b)))
