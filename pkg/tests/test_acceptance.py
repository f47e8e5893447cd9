"""Acceptance criteria, each run at its stated size and tolerance.

Statistical bounds that needed calibration were fixed from pilot runs on
different master seeds before these tests were written; the pilot figures are
kept in PILOT and printed with each result.
"""
import math
import time

import numpy as np
import pytest

from palab.cli import main
from palab.exact import BOUNDARY, exact_pa, exact_pa_boundary, oracle_enumerate
from palab.experiments import (ExperimentConfig, interval_expectations, interval_monte_carlo, probe_additivity,
                               probe_closeness, probe_cone, probe_smoothness, probe_tail, run_gamma, run_ratio)
from palab.graphs import build_mst, induced_graph, pt_heuristic
from palab.instances import StarSpec, gen_uniform, star_instance, trial_rng

TOL = 1e-9

PILOT = {
    # mean, sample sd over 50 trials at n = 10^4 (seed 0)
    "d1_p2_ratio": (1.7505, 0.0062),
    "d1_p1_ratio": (1.5001, 0.0046),
    # normalised MST, d=2, p=1, 30 trials
    "gamma_sd_250": 0.0115,
    "gamma_sd_4000": 0.0037,
    # largest normalised replacement effect seen in pilots, n in {256, 1024, 4096}
    "smooth_max": 0.76,
}
# a single constant for the smoothness maxima, fixed from the pilot with headroom
SMOOTH_CONSTANT = 1.0

pytestmark = pytest.mark.acceptance


def _mixed_params(rng):
    return int(rng.integers(2, 8)), int(rng.integers(1, 4)), float(rng.choice([1.0, 2.0, 3.0]))


def test_c01_oracle_equivalence(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = worst_b = 0.0
    for k in range(200):
        n, d, p = _mixed_params(rng)
        inst = gen_uniform(1001, k, n, d, p)
        worst = max(worst, abs(exact_pa(inst).value - oracle_enumerate(inst).value))
    for k in range(100):
        n, d, p = _mixed_params(rng)
        inst = gen_uniform(1002, k, n, d, p)
        worst_b = max(worst_b, abs(exact_pa_boundary(inst).value - oracle_enumerate(inst, BOUNDARY).value))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and worst_b <= 1e-9 and dt < 60
    criterion(1, ok, f"oracle equivalence: max |diff| interior {worst:.2e} (200), boundary {worst_b:.2e} (100), "
                     f"{dt:.1f}s (< 60s)")


def test_c02_sandwich_chain(criterion):
    rng = np.random.default_rng(2)
    bad_small = bad_large = 0
    for k in range(1000):
        n = int(rng.integers(1, 9))
        d = int(rng.integers(1, 4))
        p = float(rng.choice([1.0, 2.0, 3.0]))
        inst = gen_uniform(2001, k, n, d, p)
        mst = build_mst(inst)
        pt = pt_heuristic(inst, mst).value
        pa = exact_pa(inst).value
        if not (mst.total <= pa + TOL and pa <= pt + TOL and pt <= 2 * mst.total + TOL):
            bad_small += 1
    for k in range(1000):
        d = 1 + k % 3
        p = (1.0, 2.0, 3.0)[(k // 3) % 3]
        inst = gen_uniform(2002, k, 1000, d, p)
        mst = build_mst(inst)
        pt = pt_heuristic(inst, mst).value
        if not (mst.total <= pt + TOL and pt <= 2 * mst.total + TOL):
            bad_large += 1
    criterion(2, bad_small == 0 and bad_large == 0,
              f"sandwich chain: violations {bad_small}/1000 (n<=8, exact PA), {bad_large}/1000 (n=1000)")


def test_c03_line_ratio(criterion):
    out = []
    ok = True
    for p, lo, hi in ((2.0, 1.70, 1.80), (1.0, 1.45, 1.55)):
        res = run_ratio(ExperimentConfig(d=1, p=p, n_values=(10_000,), trials=50, seed=3003))
        vals = [r.value for r in res.records if r.functional == "PT/MST"]
        mean = math.fsum(vals) / len(vals)
        ok &= lo <= mean <= hi
        out.append(f"p={p:g} mean PT/MST {mean:.4f} in [{lo}, {hi}]")
    criterion(3, ok, "line ratio: " + "; ".join(out) + f" (pilot {PILOT['d1_p2_ratio']}, {PILOT['d1_p1_ratio']})")


def test_c04_interval_expectations(criterion):
    worst = 0.0
    for k, (ell, p) in enumerate(((0.4, 1.0), (0.4, 2.0), (1.0, 3.0))):
        em, ep = interval_expectations(ell, p)
        mm, mp = interval_monte_carlo(ell, p, 100_000, trial_rng(4004, k))
        worst = max(worst, abs(mm - em) / em, abs(mp - ep) / ep)
    criterion(4, worst <= 0.02, f"per-interval expectations: max relative error {worst:.4f} (<= 0.02)")


def test_c05_convergence_trend(criterion):
    g = run_gamma(ExperimentConfig(functional="MST", d=2, p=1.0, n_values=(250, 2000, 4000), trials=30, seed=5005))
    m2, m4 = g.per_n[2000].mean, g.per_n[4000].mean
    s250, s4000 = g.per_n[250].sd, g.per_n[4000].sd
    rel = abs(m2 - m4) / m4
    ok = rel <= 0.05 and s4000 < s250
    criterion(5, ok, f"convergence trend: means {g.trend[0]:.4f}/{m2:.4f}/{m4:.4f}, |diff|/mean {rel:.4f} (<= 0.05); "
                     f"sd(4000) {s4000:.4f} < sd(250) {s250:.4f}")


def test_c06_unbounded_degree(criterion):
    K = 10.0
    while True:
        inst = star_instance(StarSpec(3, K, 2.0))
        sol = exact_pa(inst)
        ref = oracle_enumerate(inst)
        deg = np.bincount(np.array(induced_graph(inst, sol.powers)).ravel(), minlength=inst.n)
        ref_deg = np.bincount(np.array(induced_graph(inst, ref.powers)).ravel(), minlength=inst.n)
        centre = int(np.argmax(deg))
        ok = (deg.max() == inst.n - 1 and inst.points[centre, 0] == 0.5
              and abs(sol.value - ref.value) <= TOL and np.array_equal(deg, ref_deg))
        if ok or K >= 1e4:
            break
        K *= 2
    criterion(6, ok, f"unbounded degree: star m=3 K={K:g}, max degree {deg.max()} = n-1, centre at "
                     f"{inst.points[centre, 0]}, PA {sol.value:.6f} = oracle {ref.value:.6f}")


def test_c07_cone_property(criterion):
    total = 0
    parts = []
    for d in (2, 3):
        for p in (1.0, 2.0):
            res = probe_cone(100_000, math.pi / 6, 7007, d=d, p=p)
            total += res.summary["violations"]
            parts.append(f"d{d}p{p:g}:{res.summary['violations']}")
    criterion(7, total == 0, "cone property, 10^5 triples each: violations " + " ".join(parts))


def test_c08_additivity(criterion):
    sub = sup = 0
    parts = []
    for d in (1, 2):
        for p in (1.0, 2.0):
            res = probe_additivity(500, 8, 8008, d=d, p=p)
            sub += res.summary["subadditivity_violations"]
            sup += res.summary["superadditivity_violations"]
            parts.append(f"d{d}p{p:g}:{res.summary['subadditivity_violations']}/"
                         f"{res.summary['superadditivity_violations']}")
    criterion(8, sub == 0 and sup == 0, "additivity, 500 splits each: sub/super violations " + " ".join(parts))


def test_c09_boundary_dominance(criterion):
    rng = np.random.default_rng(9)
    bad = 0
    for k in range(500):
        n = int(rng.integers(1, 9))
        d = int(rng.integers(1, 4))
        p = float(rng.choice([1.0, 2.0, 3.0]))
        inst = gen_uniform(9009, k, n, d, p)
        if exact_pa_boundary(inst).value > exact_pa(inst).value + TOL:
            bad += 1
    res = probe_closeness(ExperimentConfig(d=2, p=1.0, n_values=(4, 6, 8), trials=200, seed=9010))
    means = {n: res.summary["PA-PA_B"][str(n)]["mean"] for n in (4, 6, 8)}
    finite = all(math.isfinite(m) for m in means.values())
    ok = bad == 0 and res.summary["violations"] == 0 and finite
    criterion(9, ok, f"boundary dominance: PA_B > PA on {bad}/500 mixed + {res.summary['violations']}/600 probe "
                     f"instances; normalised mean PA-PA_B " + ", ".join(f"n={n}: {m:.4f}" for n, m in means.items()))


def test_c10_concentration(criterion):
    parts = []
    ok = True
    for p in (1.0, 2.0):
        res = probe_tail(ExperimentConfig(d=2, p=p, n_values=(256, 4096), trials=500, seed=10010,
                                          thresholds=(0.02, 0.05, 0.1)))
        tail = res.summary["tail"]
        f256 = tail["256"]["freq"]["0.1"]
        f4096 = tail["4096"]["freq"]["0.1"]
        ok &= f4096 <= f256
        # smaller thresholds are informational only
        small = ", ".join(f"t={t}: {tail['4096']['freq'][t]:.3f}/{tail['256']['freq'][t]:.3f}"
                          for t in ("0.02", "0.05"))
        parts.append(f"p={p:g} freq(4096) {f4096:.3f} <= freq(256) {f256:.3f} [{small}]")
    sm = probe_smoothness(ExperimentConfig(d=2, p=1.0, n_values=(256, 1024, 4096), trials=2, seed=10011))
    maxima = sm.summary["normalized_max"]
    ok &= all(v < SMOOTH_CONSTANT for v in maxima.values())
    parts.append("smoothness maxima " + ", ".join(f"{n}: {v:.3f}" for n, v in maxima.items())
                 + f" < c = {SMOOTH_CONSTANT} (pilot max {PILOT['smooth_max']})")
    criterion(10, ok, "concentration: " + "; ".join(parts))


def test_c11_determinism(criterion, tmp_path, capsys):
    commands = [
        ["exp", "gamma", "--n", "100,400", "--trials", "8", "--seed", "11"],
        ["exp", "ratio", "--d", "1", "--p", "2", "--n", "1000", "--trials", "10", "--seed", "42"],
        ["exp", "close", "--n", "5", "--trials", "6", "--seed", "11"],
        ["exp", "smooth", "--n", "64", "--trials", "3", "--grid", "3", "--seed", "11"],
        ["exp", "additivity", "--n", "6", "--trials", "6", "--seed", "11"],
    ]
    same = True
    for i, argv in enumerate(commands):
        bodies = []
        for w in ("1", "2", "3"):
            path = tmp_path / f"c{i}-w{w}.csv"
            assert main(argv + ["--workers", w, "-o", str(path)]) == 0
            bodies.append(path.read_bytes())
        same &= bodies[0] == bodies[1] == bodies[2]
    capsys.readouterr()
    criterion(11, same, f"determinism: {len(commands)} exp commands byte-identical across --workers 1/2/3")
