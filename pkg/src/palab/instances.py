"""Seeded random instances, the unbounded-degree star, and instance files.

Randomness: every trial gets its own PCG64 stream (numpy's
``numpy.random.PCG64``), seeded with ``trial_seed(master, trial)`` - a
SplitMix64 finaliser applied to ``master + (trial + 1) * 0x9E3779B97F4A7C15``.
Points are the first ``n * d`` doubles of ``Generator.random`` in row-major
order. The stream depends only on ``(master, trial)``, never on scheduling.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError
from .geometry import Params
from .graphs import Instance

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trial_seed(master: int, trial: int, stream: int = 0) -> int:
    """Stable 64-bit seed for ``(master, trial)``; ``stream`` selects a sub-stream."""
    if master < 0 or master > MASK64:
        raise InputError(f"master seed must be a 64-bit unsigned integer, got {master}")
    z = splitmix64((master + (trial + 1) * GOLDEN) & MASK64)
    if stream:
        z = splitmix64((z + stream * GOLDEN) & MASK64)
    return z


def trial_rng(master: int, trial: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(trial_seed(master, trial, stream)))


def default_seed() -> int:
    """Master seed from ``PALAB_SEED`` or 0."""
    raw = os.environ.get("PALAB_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw, 0)
    except ValueError:
        raise InputError(f"PALAB_SEED must be an integer, got {raw!r}") from None


def gen_uniform(seed: int, trial: int, n: int, d: int, p: float = 1.0) -> Instance:
    """``n`` i.i.d. uniform points in ``[0,1]^d``, reproducible from ``(seed, trial)``."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if d < 1:
        raise InputError(f"d must be >= 1, got {d}")
    pts = trial_rng(seed, trial).random((n, d))
    return Instance(Params(d, p), pts)


@dataclass(frozen=True)
class StarSpec:
    m: int
    ratio: float = 10.0
    p: float = 2.0

    def __post_init__(self):
        if self.m < 1:
            raise InputError("m must be >= 1")
        if not self.ratio > 1:
            raise InputError("ratio K must be > 1")


def star_raw(m: int, ratio: float) -> np.ndarray:
    mags = ratio ** np.arange(m, dtype=float)
    return np.concatenate([-mags[::-1], [0.0], mags])


def star_instance(spec: StarSpec) -> Instance:
    """``2m+1`` collinear points with geometrically growing magnitudes, mapped onto [0,1]."""
    raw = star_raw(spec.m, spec.ratio)
    a = raw[-1]
    pts = (raw + a) / (2 * a)
    pts[spec.m] = 0.5
    return Instance(Params(1, spec.p), pts.reshape(-1, 1))


# --- persistence -------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def dumps_instance(inst: Instance) -> str:
    pts = ", ".join("[" + ", ".join(_fmt(c) for c in row) + "]" for row in inst.points)
    return f'{{"d": {inst.d}, "p": {_fmt(inst.p)}, "points": [{pts}]}}\n'


def save_instance(inst: Instance, path) -> None:
    Path(path).write_text(dumps_instance(inst))


def loads_instance(text: str, source: str = "<string>") -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{source}:{e.lineno}:{e.colno}: malformed JSON: {e.msg}") from None
    if not isinstance(data, dict) or set(data) != {"d", "p", "points"}:
        raise InputError(f"{source}: expected exactly the keys 'd', 'p', 'points'")
    d, p, points = data["d"], data["p"], data["points"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise InputError(f"{source}: field 'd' must be a positive integer, got {d!r}")
    if not isinstance(p, (int, float)) or isinstance(p, bool) or not math.isfinite(p) or p <= 0:
        raise InputError(f"{source}: field 'p' must be > 0, got {p!r}")
    if not isinstance(points, list) or not points:
        raise InputError(f"{source}: field 'points' must be a non-empty list")
    for i, row in enumerate(points):
        if not isinstance(row, list) or len(row) != d:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise InputError(f"{source}: points[{i}] must have {d} coordinates, got {got}")
        for j, c in enumerate(row):
            if not isinstance(c, (int, float)) or isinstance(c, bool) or not math.isfinite(c):
                raise InputError(f"{source}: points[{i}][{j}] is not a finite number")
            if not 0.0 <= c <= 1.0:
                raise InputError(f"{source}: points[{i}][{j}] = {c} outside [0, 1]")
    return Instance(Params(d, float(p)), np.array(points, dtype=np.float64))


def load_instance(path) -> Instance:
    return loads_instance(Path(path).read_text(), str(path))
