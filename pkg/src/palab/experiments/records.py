"""Experiment configuration, per-trial records and aggregate statistics."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import CapacityError, InputError
from ..exact import DEFAULT_BUDGET
from ..geometry import Params

FUNCTIONALS = ("MST", "PT", "PA_exact", "PA_B_exact")
EXACT_FUNCTIONALS = ("PA_exact", "PA_B_exact")

CSV_COLUMNS = ("experiment_id", "functional", "d", "p", "n", "trial", "seed",
               "value", "normalized_value", "wall_ms")


@dataclass(frozen=True)
class ExperimentConfig:
    functional: str = "MST"
    d: int = 2
    p: float = 1.0
    n_values: tuple = (100,)
    trials: int = 10
    seed: int = 0
    beta: float = 1.0
    budget: int = DEFAULT_BUDGET
    grid: int = 8
    c_ball: float = 2.0
    thresholds: tuple = (0.05, 0.1, 0.2)
    alpha: float = math.pi / 6
    timing: bool = False

    def __post_init__(self):
        Params(self.d, self.p)  # validates d and p
        if self.functional not in FUNCTIONALS:
            raise InputError(f"functional must be one of {FUNCTIONALS}, got {self.functional!r}")
        ns = tuple(int(n) for n in self.n_values)
        if not ns or min(ns) < 1:
            raise InputError("every n must be >= 1")
        object.__setattr__(self, "n_values", tuple(sorted(set(ns))))
        object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))
        if self.trials < 1:
            raise InputError("trials must be >= 1")
        if self.functional in EXACT_FUNCTIONALS:
            self.require_exact()

    @property
    def params(self) -> Params:
        return Params(self.d, self.p)

    def require_exact(self):
        if max(self.n_values) > self.budget:
            raise CapacityError(
                f"exact functional requested with n={max(self.n_values)} over the exact budget {self.budget}",
                budget=self.budget,
            )

    def echo(self) -> dict:
        out = asdict(self)
        out["n_values"] = list(self.n_values)
        out["thresholds"] = list(self.thresholds)
        return out


@dataclass(frozen=True)
class TrialRecord:
    experiment_id: str
    functional: str
    d: int
    p: float
    n: int
    trial: int
    seed: int
    value: float
    normalized_value: float
    wall_ms: float | None = None

    @property
    def key(self):
        return (self.experiment_id, self.functional, self.n, self.trial)


def scaling_exponent(d: int, p: float) -> float:
    """``(d - p) / d`` evaluated exactly, then rounded once to float."""
    return float((Fraction(d) - Fraction(p)) / Fraction(d))


def normalize(value: float, n: int, d: int, p: float) -> float:
    return value / float(n) ** scaling_exponent(d, p)


@dataclass(frozen=True)
class Stats:
    count: int
    mean: float
    sd: float
    min: float
    max: float

    @classmethod
    def of(cls, values) -> "Stats":
        v = np.asarray(values, dtype=float)
        sd = float(np.std(v, ddof=1)) if len(v) > 1 else 0.0
        # math.fsum keeps the mean independent of trial order
        mean = math.fsum(v.tolist()) / len(v)
        return cls(len(v), mean, sd, float(v.min()), float(v.max()))


@dataclass
class GammaEstimate:
    functional: str
    d: int
    p: float
    per_n: dict  # n -> Stats of normalized values
    records: list = field(default_factory=list, repr=False)

    @property
    def trend(self) -> list[float]:
        return [self.per_n[n].mean for n in sorted(self.per_n)]

    def summary(self) -> dict:
        return {str(n): asdict(s) for n, s in sorted(self.per_n.items())}


@dataclass
class ExperimentResult:
    """Rows for the results CSV plus a JSON-able summary."""

    experiment_id: str
    records: list
    summary: dict
