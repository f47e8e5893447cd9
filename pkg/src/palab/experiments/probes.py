"""Monte Carlo experiments and probes.

Each ``run_*``/``probe_*`` function schedules independent trials keyed by
``(n, trial)``; every trial regenerates its instance from the master seed, so
results do not depend on the worker count or completion order.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import asdict

import numpy as np
from scipy.spatial import cKDTree

from ..errors import InputError
from ..exact import exact_pa, exact_pa_boundary
from ..geometry import TOL, HyperRect, Params
from ..graphs import KNN_K, Instance, ReplacementWorkspace, build_mst, pt_heuristic
from ..instances import gen_uniform, trial_rng
from .harness import Timer, evaluate, make_record, merge, run_tasks
from .oned import run_d1_decomposition
from .records import EXACT_FUNCTIONALS, ExperimentConfig, ExperimentResult, GammaEstimate, Stats

# sub-stream ids for randomness beyond the instance points
_VICTIMS = 1
_SPLIT = 2


def experiment_id(kind: str, cfg: ExperimentConfig) -> str:
    return f"{kind}-{cfg.functional}-d{cfg.d}-p{cfg.p:g}"


def log_scale(n: int, d: int, power: float) -> float:
    """``(log n / n)^(power/d)``; 1.0 for n = 1 where the scale is meaningless."""
    if n < 2:
        return 1.0
    return (math.log(n) / n) ** (power / d)


def _per_functional_stats(records) -> dict:
    groups = defaultdict(list)
    for r in records:
        groups[(r.functional, r.n)].append(r.normalized_value)
    out = defaultdict(dict)
    for (f, n), vals in sorted(groups.items()):
        out[f][str(n)] = asdict(Stats.of(vals))
    return dict(out)


def _grid_args(cfg):
    return [(cfg, n, t) for n in cfg.n_values for t in range(cfg.trials)]


# --- gamma -------------------------------------------------------------------

def _gamma_trial(cfg, n, trial):
    inst = gen_uniform(cfg.seed, trial, n, cfg.d, cfg.p)
    with Timer() as tm:
        v = evaluate(cfg.functional, inst, cfg.budget)
    return [make_record(experiment_id("gamma", cfg), cfg.functional, cfg, n, trial, v, tm.elapsed)]


def run_gamma(cfg: ExperimentConfig, workers: int | None = 1) -> GammaEstimate:
    """Per-n statistics of ``F(n) / n^((d-p)/d)``."""
    recs = merge(run_tasks(_gamma_trial, _grid_args(cfg), workers))
    by_n = defaultdict(list)
    for r in recs:
        by_n[r.n].append(r.normalized_value)
    return GammaEstimate(cfg.functional, cfg.d, cfg.p, {n: Stats.of(v) for n, v in sorted(by_n.items())}, recs)


# --- approximation ratios ----------------------------------------------------

def _ratio_trial(cfg, n, trial):
    inst = gen_uniform(cfg.seed, trial, n, cfg.d, cfg.p)
    eid = experiment_id("ratio", cfg)
    with Timer() as tm:
        mst = build_mst(inst)
        pt = pt_heuristic(inst, mst).value
    out = []
    r_mst = pt / mst.total if mst.total > 0 else 1.0
    out.append(make_record(eid, "PT/MST", cfg, n, trial, r_mst, tm.elapsed, normalized=r_mst))
    # two times the floor((n-1)/2) heaviest edges; measured, not asserted (undefined below n = 3)
    m = (n - 1) // 2
    if m > 0:
        h = mst.heaviest_sum(m)
        r_h = pt / (2 * h) if h > 0 else 1.0
        out.append(make_record(eid, "PT/2H", cfg, n, trial, r_h, tm.elapsed, normalized=r_h))
    if n <= cfg.budget:
        with Timer() as tm2:
            pa = exact_pa(inst, budget=cfg.budget).value
        r_pa = pt / pa if pa > 0 else 1.0
        out.append(make_record(eid, "PT/PA", cfg, n, trial, r_pa, tm2.elapsed, normalized=r_pa))
        r_pm = pa / mst.total if mst.total > 0 else 1.0
        out.append(make_record(eid, "PA/MST", cfg, n, trial, r_pm, tm2.elapsed, normalized=r_pm))
    return out


def run_ratio(cfg: ExperimentConfig, workers: int | None = 1) -> ExperimentResult:
    """PT/MST for every n; PT/PA and PA/MST as well when n is within the exact budget."""
    recs = merge(run_tasks(_ratio_trial, _grid_args(cfg), workers))
    summary = _per_functional_stats(recs)
    summary["pt_le_2h_fraction"] = {
        str(n): float(np.mean([r.value <= 1 + TOL for r in recs if r.functional == "PT/2H" and r.n == n]))
        for n in cfg.n_values if n >= 3
    }
    return ExperimentResult(experiment_id("ratio", cfg), recs, summary)


# --- d = 1 decomposition -----------------------------------------------------

_D1_FIELDS = ("M_star", "M_prime", "P_star", "P_prime", "M_even", "M_odd", "P_even", "P_odd")


def _d1_trial(cfg, n, trial):
    inst = gen_uniform(cfg.seed, trial, n, 1, cfg.p)
    eid = experiment_id("d1", cfg)
    with Timer() as tm:
        dec = run_d1_decomposition(inst)
    out = [make_record(eid, f, cfg, n, trial, getattr(dec, f), tm.elapsed) for f in _D1_FIELDS]
    out.append(make_record(eid, "P_star/M_star", cfg, n, trial, dec.ratio_star, tm.elapsed,
                           normalized=dec.ratio_star))
    return out


def run_d1(cfg: ExperimentConfig, workers: int | None = 1) -> ExperimentResult:
    if cfg.d != 1:
        raise InputError("the d1 experiment needs d = 1")
    recs = merge(run_tasks(_d1_trial, _grid_args(cfg), workers))
    summary = _per_functional_stats(recs)
    summary["target_ratio"] = 2 - 2.0**-cfg.p
    return ExperimentResult(experiment_id("d1", cfg), recs, summary)


# --- smoothness ----------------------------------------------------------------

def grid_points(g: int, d: int) -> np.ndarray:
    axis = (np.arange(g) + 0.5) / g
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def max_replacement_effect(inst: Instance, functional: str, victims, targets, budget: int) -> float:
    """Largest ``|F(X with one victim moved to a target) - F(X)|``."""
    base = evaluate(functional, inst, budget)
    worst = 0.0
    if functional in ("MST", "PT") and inst.n > 2 * KNN_K and inst.d > 1:
        ws = ReplacementWorkspace(inst.points)
        pick = 0 if functional == "MST" else 1
        for v in victims:
            for q in targets:
                worst = max(worst, abs(ws.totals(int(v), q, inst.p)[pick] - base))
        return worst
    pts = np.array(inst.points)
    for v in victims:
        keep = pts[v].copy()
        for q in targets:
            pts[v] = q
            val = evaluate(functional, Instance(inst.params, pts), budget)
            worst = max(worst, abs(val - base))
        pts[v] = keep
    return worst


def _smooth_trial(cfg, n, trial):
    inst = gen_uniform(cfg.seed, trial, n, cfg.d, cfg.p)
    s = min(n, 32)
    victims = np.sort(trial_rng(cfg.seed, trial, _VICTIMS).choice(n, size=s, replace=False))
    with Timer() as tm:
        worst = max_replacement_effect(inst, cfg.functional, victims, grid_points(cfg.grid, cfg.d), cfg.budget)
    norm = worst / log_scale(n, cfg.d, cfg.p) if n > 1 else 0.0
    return [make_record(experiment_id("smooth", cfg), f"smooth:{cfg.functional}", cfg, n, trial, worst,
                        tm.elapsed, normalized=norm)]


def probe_smoothness(cfg: ExperimentConfig, workers: int | None = 1) -> ExperimentResult:
    """Largest single-point replacement effect, normalised by ``(log n / n)^(p/d)``."""
    if cfg.functional in EXACT_FUNCTIONALS:
        cfg.require_exact()
    recs = merge(run_tasks(_smooth_trial, _grid_args(cfg), workers))
    per_n = {str(n): max(r.normalized_value for r in recs if r.n == n) for n in cfg.n_values}
    summary = {"normalized_max": per_n, "observed_constant": max(per_n.values()),
               "victims_per_trial": {str(n): min(n, 32) for n in cfg.n_values},
               "grid": cfg.grid}
    return ExperimentResult(experiment_id("smooth", cfg), recs, summary)


# --- closeness -----------------------------------------------------------------

def _close_trial(cfg, n, trial):
    inst = gen_uniform(cfg.seed, trial, n, cfg.d, cfg.p)
    with Timer() as tm:
        pa = exact_pa(inst, budget=cfg.budget).value
        pab = exact_pa_boundary(inst, HyperRect.unit(cfg.d), budget=cfg.budget).value
    return [make_record(experiment_id("close", cfg), "PA-PA_B", cfg, n, trial, pa - pab, tm.elapsed)]


def probe_closeness(cfg: ExperimentConfig, workers: int | None = 1) -> ExperimentResult:
    cfg.require_exact()
    recs = merge(run_tasks(_close_trial, _grid_args(cfg), workers))
    summary = _per_functional_stats(recs)
    summary["violations"] = sum(r.value < -TOL for r in recs)
    return ExperimentResult(experiment_id("close", cfg), recs, summary)


# --- tails ---------------------------------------------------------------------

def tail_frequencies(values, thresholds) -> dict:
    """Fraction of values with ``|v - mean| >= t * mean`` for each relative threshold ``t``."""
    v = np.asarray(values, dtype=float)
    mean = math.fsum(v.tolist()) / len(v)
    dev = np.abs(v - mean)
    return {t: float(np.mean(dev >= t * mean)) for t in thresholds}


def tail_bound_exponent(t_abs: float, n: int, d: int, p: float) -> float:
    """``t^2 n^(2p/d - 1) / (log n)^(2p/d)``; the bound is ``exp(-this / C)``."""
    if n < 2:
        return 0.0
    return t_abs**2 * n ** (2 * p / d - 1) / math.log(n) ** (2 * p / d)


def probe_tail(cfg: ExperimentConfig, workers: int | None = 1) -> ExperimentResult:
    """Exceedance frequencies of ``|F(n) - mean_n| >= t * mean_n`` plus a fitted bound column."""
    recs = merge(run_tasks(_gamma_trial, _grid_args(cfg), workers))
    recs = [r.__class__(**{**asdict(r), "experiment_id": experiment_id("tail", cfg)}) for r in recs]
    table = {}
    points = []
    for n in cfg.n_values:
        vals = [r.value for r in recs if r.n == n]
        mean = math.fsum(vals) / len(vals)
        freqs = tail_frequencies(vals, cfg.thresholds)
        table[str(n)] = {"mean": mean, "freq": {format(t, "g"): f for t, f in freqs.items()}}
        for t, f in freqs.items():
            a = tail_bound_exponent(t * mean, n, cfg.d, cfg.p)
            if 0 < f < 1 and a > 0:
                points.append(a / -math.log(f))
    c_fit = max(points) if points else None
    for n in cfg.n_values:
        row = table[str(n)]
        row["bound"] = {
            format(t, "g"): (math.exp(-tail_bound_exponent(t * row["mean"], n, cfg.d, cfg.p) / c_fit)
                             if c_fit else None)
            for t in cfg.thresholds
        }
    return ExperimentResult(experiment_id("tail", cfg), recs, {"tail": table, "fitted_C": c_fit})


# --- empty balls ---------------------------------------------------------------

def ball_centers(n: int, d: int) -> tuple[np.ndarray, float]:
    """Grid of centres covering ``[0,1]^d`` at pitch ``(log n / n)^(1/d) / 2``."""
    pitch = 0.5 * log_scale(n, d, 1.0) if n > 1 else 0.5
    k = int(math.ceil(1.0 / pitch)) + 1
    axis = np.linspace(0.0, 1.0, k)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1), 1.0 / (k - 1)


def has_empty_ball(points: np.ndarray, radius: float, centers: np.ndarray) -> bool:
    dist, _ = cKDTree(points).query(centers, k=1)
    return bool(np.any(dist >= radius))


def _ball_trial(cfg, n, trial):
    inst = gen_uniform(cfg.seed, trial, n, cfg.d, cfg.p)
    centers, _ = ball_centers(n, cfg.d)
    r = cfg.c_ball * log_scale(n, cfg.d, 1.0)
    with Timer() as tm:
        empty = has_empty_ball(inst.points, r, centers)
    return [make_record(experiment_id("emptyball", cfg), "empty_ball", cfg, n, trial, float(empty), tm.elapsed,
                        normalized=float(empty))]


def probe_empty_ball(cfg: ExperimentConfig, workers: int | None = 1) -> ExperimentResult:
    """Fraction of trials with a point-free ball of radius ``c_ball (log n / n)^(1/d)``."""
    if not cfg.c_ball > 0:
        raise InputError("c_ball must be > 0")
    recs = merge(run_tasks(_ball_trial, _grid_args(cfg), workers))
    frac = {str(n): float(np.mean([r.value for r in recs if r.n == n])) for n in cfg.n_values}
    pitch = {str(n): ball_centers(n, cfg.d)[1] for n in cfg.n_values}
    return ExperimentResult(experiment_id("emptyball", cfg), recs, {
        "fraction": frac, "c_ball": cfg.c_ball, "grid_pitch": pitch,
        "note": "centres on a fixed grid of pitch (log n/n)^(1/d)/2 independent of c_ball",
    })


# --- longest edges and degrees ---------------------------------------------------

def _longest_trial(cfg, n, trial):
    inst = gen_uniform(cfg.seed, trial, n, cfg.d, cfg.p)
    eid = experiment_id("longestedge", cfg)
    with Timer() as tm:
        mst = build_mst(inst)
        pt = pt_heuristic(inst, mst)
    le = mst.longest_edge
    mp = float(pt.powers.max())
    return [
        make_record(eid, "MST_longest_edge", cfg, n, trial, le, tm.elapsed,
                    normalized=le / log_scale(n, cfg.d, 1.0)),
        make_record(eid, "PT_max_power", cfg, n, trial, mp, tm.elapsed,
                    normalized=mp / log_scale(n, cfg.d, cfg.p)),
        make_record(eid, "MST_max_degree", cfg, n, trial, mst.max_degree, tm.elapsed,
                    normalized=float(mst.max_degree)),
    ]


def probe_longest_edge(cfg: ExperimentConfig, workers: int | None = 1) -> ExperimentResult:
    recs = merge(run_tasks(_longest_trial, _grid_args(cfg), workers))
    return ExperimentResult(experiment_id("longestedge", cfg), recs, _per_functional_stats(recs))


# --- cone property -------------------------------------------------------------

def cone_factor(alpha: float) -> float:
    return math.sin(2 * alpha) / math.sin(alpha)


def cone_violations(x: np.ndarray, y: np.ndarray, v: np.ndarray, alpha: float, p: float) -> tuple[int, int]:
    """Count violations of parts (a) and (b) over a batch of triples.

    Rows must already satisfy ``|x-v| <= |y-v|`` and angle at ``v`` at most ``alpha``.
    Powers are ``|x-v|^p`` and ``|y-v|^p``.
    """
    dx = np.linalg.norm(x - v, axis=1)
    dy = np.linalg.norm(y - v, axis=1)
    dxy = np.linalg.norm(x - y, axis=1)
    psi_x = dx**p
    psi_y = dy**p
    need = dxy**p
    eps = 1e-12
    viol_a = psi_y < need * (1 - eps) - eps
    unconnected = psi_x < need * (1 - eps) - eps
    viol_b = unconnected & ~(dy > cone_factor(alpha) * dx * (1 - eps))
    return int(viol_a.sum()), int(viol_b.sum())


def sample_cone_triples(rng: np.random.Generator, samples: int, d: int, alpha: float):
    """Uniform triples in ``[0,1]^d`` conditioned on the cone configuration (rejection sampling)."""
    xs, ys, vs = [], [], []
    have = 0
    while have < samples:
        m = max(1024, 4 * (samples - have))
        x, y, v = rng.random((m, d)), rng.random((m, d)), rng.random((m, d))
        a = x - v
        b = y - v
        na = np.linalg.norm(a, axis=1)
        nb = np.linalg.norm(b, axis=1)
        ok = (na > 0) & (nb > 0)
        cos = np.clip(np.einsum("ij,ij->i", a, b) / np.where(ok, na * nb, 1.0), -1.0, 1.0)
        ok &= np.arccos(cos) <= alpha
        swap = na > nb
        x2 = np.where(swap[:, None], y, x)
        y2 = np.where(swap[:, None], x, y)
        xs.append(x2[ok])
        ys.append(y2[ok])
        vs.append(v[ok])
        have += int(ok.sum())
    return (np.concatenate(xs)[:samples], np.concatenate(ys)[:samples], np.concatenate(vs)[:samples])


def probe_cone(samples: int, alpha: float, seed: int, d: int = 2, p: float = 1.0,
               batches: int = 1) -> ExperimentResult:
    """Random check of the cone property; the expected violation count is zero."""
    if not 0 < alpha <= math.pi / 3 + 1e-15:
        raise InputError(f"alpha must lie in (0, pi/3], got {alpha}")
    Params(d, p)
    cfg = ExperimentConfig(functional="MST", d=d, p=p, n_values=(3,), trials=max(1, batches), seed=seed,
                           alpha=alpha)
    eid = f"cone-d{d}-p{p:g}"
    recs = []
    total_a = total_b = 0
    per = [samples // cfg.trials + (1 if b < samples % cfg.trials else 0) for b in range(cfg.trials)]
    for b, cnt in enumerate(per):
        if cnt == 0:
            continue
        x, y, v = sample_cone_triples(trial_rng(seed, b), cnt, d, alpha)
        va, vb = cone_violations(x, y, v, alpha, p)
        total_a += va
        total_b += vb
        recs.append(make_record(eid, "cone_violations_a", cfg, 3, b, va, 0.0, normalized=va))
        recs.append(make_record(eid, "cone_violations_b", cfg, 3, b, vb, 0.0, normalized=vb))
    recs.sort(key=lambda r: (r.functional, r.n, r.trial))
    return ExperimentResult(eid, recs, {"samples": samples, "alpha": alpha, "factor": cone_factor(alpha),
                                        "violations_a": total_a, "violations_b": total_b,
                                        "violations": total_a + total_b})


# --- additivity ----------------------------------------------------------------

def _bbox(points: np.ndarray) -> HyperRect:
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    hi = np.where(hi > lo, hi, lo + 1e-12)
    return HyperRect(tuple(lo), tuple(hi))


def _pa(points: np.ndarray, p: float, budget: int) -> float:
    if len(points) == 0:
        return 0.0
    return exact_pa(Instance(Params(points.shape[1], p), points), budget=budget).value


def _pab(points: np.ndarray, r: HyperRect, p: float, budget: int) -> float:
    if len(points) == 0:
        return 0.0
    return exact_pa_boundary(Instance(Params(points.shape[1], p), points), r, budget=budget).value


def subadditivity_margin(X: np.ndarray, Y: np.ndarray, p: float, budget: int) -> float:
    """``PA(X) + PA(Y) + 2 diam(R)^p - PA(X u Y)`` with ``R`` the bounding box of ``X u Y``."""
    U = np.unique(np.vstack([X, Y]), axis=0)
    diam = _bbox(U).diameter if len(U) > 1 else 0.0
    return _pa(X, p, budget) + _pa(Y, p, budget) + 2 * diam**p - _pa(U, p, budget)


def superadditivity_margin(Z: np.ndarray, axis: int, cut: float, p: float, budget: int) -> float:
    """``PA_B(Z, R) - PA_B(Z n R1, R1) - PA_B(Z n R2, R2)`` for the unit cube ``R`` split at ``cut``."""
    d = Z.shape[1]
    R = HyperRect.unit(d)
    R1, R2 = R.split(axis, cut)
    low = Z[:, axis] <= cut
    return _pab(Z, R, p, budget) - _pab(Z[low], R1, p, budget) - _pab(Z[~low], R2, p, budget)


def _additivity_trial(cfg, n_max, trial):
    rng = trial_rng(cfg.seed, trial, _SPLIT)
    d, p = cfg.d, cfg.p
    a = int(rng.integers(1, n_max))
    b = int(rng.integers(1, n_max - a + 1))
    X = rng.random((a, d))
    Y = rng.random((b, d))
    eid = f"additivity-d{d}-p{p:g}"
    with Timer() as tm:
        sub = subadditivity_margin(X, Y, p, cfg.budget)
    out = [make_record(eid, "subadd_margin", cfg, a + b, trial, sub, tm.elapsed, normalized=sub)]
    if p >= 1:
        k = int(rng.integers(1, n_max + 1))
        Z = rng.random((k, d))
        axis = int(rng.integers(0, d))
        cut = float(rng.uniform(0.0, 1.0))
        while not 0.0 < cut < 1.0:
            cut = float(rng.uniform(0.0, 1.0))
        with Timer() as tm:
            sup = superadditivity_margin(Z, axis, cut, p, cfg.budget)
        out.append(make_record(eid, "superadd_margin", cfg, k, trial, sup, tm.elapsed, normalized=sup))
    return out


def probe_additivity(trials: int, n_max: int, seed: int, d: int = 2, p: float = 1.0,
                     budget: int = 12, workers: int | None = 1) -> ExperimentResult:
    """Random subadditivity and (for p >= 1) superadditivity checks; violations are negative margins."""
    if not 2 <= n_max <= budget:
        raise InputError(f"n_max must lie in [2, budget={budget}], got {n_max}")
    cfg = ExperimentConfig(functional="MST", d=d, p=p, n_values=(n_max,), trials=trials, seed=seed,
                           budget=budget)
    recs = run_tasks(_additivity_trial, [(cfg, n_max, t) for t in range(trials)], workers)
    recs = [r for rs in recs for r in rs]
    recs.sort(key=lambda r: (r.functional, r.trial))
    sub_v = sum(r.value < -TOL for r in recs if r.functional == "subadd_margin")
    sup_v = sum(r.value < -TOL for r in recs if r.functional == "superadd_margin")
    return ExperimentResult(f"additivity-d{d}-p{p:g}", recs, {
        "subadditivity_violations": int(sub_v), "superadditivity_violations": int(sup_v),
        "superadditivity_checked": p >= 1, "trials": trials, "n_max": n_max,
    })
