"""palab: minimum-power connectivity laboratory.

Exact and heuristic power assignments on random geometric point sets, the
boundary variant, and Monte Carlo probes of their asymptotics.
"""
from .errors import CapacityError, InputError
from .geometry import HyperRect, Params, angle_at, dist_to_boundary, powered_dist
from .graphs import (
    Instance,
    MstSummary,
    PaSolution,
    build_mst,
    induced_graph,
    induced_power,
    is_connected_pa,
    pt_heuristic,
    sandwich_check,
)
from .exact import (
    BoundarySolution,
    CandidateLevels,
    candidate_levels,
    exact_pa,
    exact_pa_boundary,
    oracle_enumerate,
)
from .instances import StarSpec, gen_uniform, load_instance, save_instance, star_instance
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundarySolution",
    "CandidateLevels",
    "CapacityError",
    "HyperRect",
    "InputError",
    "Instance",
    "MstSummary",
    "PaSolution",
    "Params",
    "StarSpec",
    "angle_at",
    "build_mst",
    "candidate_levels",
    "dist_to_boundary",
    "exact_pa",
    "exact_pa_boundary",
    "gen_uniform",
    "induced_graph",
    "induced_power",
    "is_connected_pa",
    "load_instance",
    "oracle_enumerate",
    "powered_dist",
    "pt_heuristic",
    "sandwich_check",
    "save_instance",
    "star_instance",
]
