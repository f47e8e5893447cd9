import math

import numpy as np
import pytest

from palab import Instance, Params
from palab.errors import CapacityError, InputError
from palab.experiments import (ExperimentConfig, Stats, csv_text, interval_expectations, interval_monte_carlo,
                               normalize, probe_additivity, probe_closeness, probe_cone, probe_empty_ball,
                               probe_longest_edge, probe_smoothness, probe_tail, run_d1, run_d1_decomposition,
                               run_gamma, run_ratio)
from palab.experiments.probes import (ball_centers, cone_factor, cone_violations, grid_points, has_empty_ball,
                                      max_replacement_effect, subadditivity_margin, superadditivity_margin,
                                      tail_frequencies)
from palab.experiments.records import scaling_exponent
from palab.graphs import build_mst, pt_heuristic
from palab.instances import gen_uniform


def cfg(**kw):
    return ExperimentConfig(**kw)


def test_config_validation():
    with pytest.raises(InputError, match="p must be > 0"):
        cfg(p=0)
    with pytest.raises(InputError):
        cfg(trials=0)
    with pytest.raises(InputError):
        cfg(functional="XYZ")
    with pytest.raises(CapacityError):
        cfg(functional="PA_exact", n_values=(13,))
    assert cfg(n_values=(50, 10, 50)).n_values == (10, 50)


def test_scaling_exponent_exact():
    assert scaling_exponent(3, 1.0) == 2 / 3
    assert scaling_exponent(2, 2.0) == 0.0
    assert normalize(10.0, 100, 2, 1.0) == pytest.approx(1.0)


def test_stats_are_order_invariant():
    rng = np.random.default_rng(0)
    v = rng.random(101) * 1e6
    a = Stats.of(v)
    b = Stats.of(v[::-1])
    assert a.mean == b.mean
    assert a.min <= a.mean <= a.max and a.sd >= 0


def test_gamma_single_point_is_zero():
    g = run_gamma(cfg(n_values=(1,), trials=3))
    assert all(r.normalized_value == 0.0 for r in g.records)


def test_gamma_line_mst_matches_order_statistics():
    # d=1, p=1: MST is the spread of the sample, expectation (n-1)/(n+1)
    g = run_gamma(cfg(d=1, p=1.0, n_values=(2000,), trials=30, seed=5))
    assert g.per_n[2000].mean == pytest.approx(1999 / 2001, abs=0.02)


def test_gamma_is_permutation_invariant_and_worker_independent():
    c = cfg(n_values=(50, 100), trials=6, seed=9)
    a = run_gamma(c, workers=1)
    b = run_gamma(c, workers=2)
    assert csv_text(a.records) == csv_text(b.records)
    assert a.trend == b.trend


def test_ratio_rows():
    res = run_ratio(cfg(d=2, p=2.0, n_values=(2, 8, 40), trials=5, seed=1))
    rows = {(r.functional, r.n) for r in res.records}
    assert ("PT/PA", 8) in rows and ("PT/PA", 40) not in rows
    for r in res.records:
        if r.functional == "PT/PA" and r.n == 2:
            assert r.value == 1.0
        if r.functional in ("PT/MST", "PA/MST", "PT/PA"):
            assert 1 - 1e-9 <= r.value <= 2 + 1e-9


def test_d1_identities():
    inst = gen_uniform(4, 0, 301, 1, 2.0)
    dec = run_d1_decomposition(inst)
    aug = Instance(Params(1, 2.0), np.vstack([[[0.0]], inst.points, [[1.0]]]))
    m = build_mst(aug)
    assert dec.M_star + dec.M_prime == pytest.approx(m.total, rel=1e-12)
    assert dec.P_star + dec.P_prime == pytest.approx(pt_heuristic(aug, m).value, rel=1e-12)
    assert dec.M_even + dec.M_odd == dec.M_star
    assert dec.P_even + dec.P_odd == dec.P_star
    assert dec.mst_points == pytest.approx(build_mst(inst).total, rel=1e-12)
    assert dec.pt_points == pytest.approx(pt_heuristic(inst).value, rel=1e-12)
    gaps = np.diff(np.concatenate([[0.0], np.sort(inst.points[:, 0]), [1.0]]))
    assert dec.M_prime <= 2 * gaps.max() ** 2


def test_d1_equal_spacing_ratio_one():
    pts = (np.arange(1, 10) / 10).reshape(-1, 1)
    dec = run_d1_decomposition(Instance(Params(1, 3.0), pts))
    assert dec.P_star == pytest.approx(dec.M_star)
    assert dec.ratio_star == pytest.approx(1.0)


def test_d1_rejects_higher_dimension():
    with pytest.raises(InputError):
        run_d1_decomposition(gen_uniform(0, 0, 5, 2))


def test_run_d1_records():
    res = run_d1(cfg(d=1, p=1.0, n_values=(100,), trials=3))
    assert {r.functional for r in res.records} >= {"P_star/M_star", "M_even"}


def test_interval_expectations():
    assert interval_expectations(0.4, 1.0) == pytest.approx((0.2, 0.3))
    em, ep = interval_monte_carlo(0.4, 1.0, 100_000, np.random.default_rng(0))
    assert em == pytest.approx(0.2, abs=0.01)
    assert ep == pytest.approx(0.3, abs=0.01)


def test_replacement_identity_is_zero():
    inst = gen_uniform(1, 0, 20, 2)
    assert max_replacement_effect(inst, "MST", [3], inst.points[[3]], 12) == 0.0
    one = gen_uniform(1, 0, 1, 2)
    assert max_replacement_effect(one, "MST", [0], grid_points(4, 2), 12) == 0.0


def test_grid_points():
    g = grid_points(3, 2)
    assert g.shape == (9, 2)
    assert g.min() >= 0 and g.max() <= 1


def test_smoothness_small():
    res = probe_smoothness(cfg(n_values=(64,), trials=2, grid=4, seed=2))
    assert res.summary["observed_constant"] > 0
    assert math.isfinite(res.summary["observed_constant"])
    assert res.summary["victims_per_trial"] == {"64": 32}


def test_closeness_nonnegative():
    res = probe_closeness(cfg(n_values=(1, 4), trials=10, seed=3))
    assert res.summary["violations"] == 0
    assert all(r.value >= -1e-9 for r in res.records)
    with pytest.raises(CapacityError):
        probe_closeness(cfg(n_values=(14,), trials=1, budget=13))


def test_centered_point_closeness_zero():
    inst = Instance(Params(2, 1.0), np.array([[0.5, 0.5]]))
    from palab.exact import exact_pa, exact_pa_boundary
    assert exact_pa(inst).value == exact_pa_boundary(inst).value == 0.0


def test_tail_frequencies_nested():
    rng = np.random.default_rng(0)
    v = rng.normal(10, 1, 500)
    f = tail_frequencies(v, [0.0, 0.05, 0.1, 0.2])
    assert f[0.0] == 1.0
    assert f[0.0] >= f[0.05] >= f[0.1] >= f[0.2]


def test_probe_tail_structure():
    res = probe_tail(cfg(n_values=(64, 256), trials=40, thresholds=(0.02, 0.05)))
    for n in ("64", "256"):
        row = res.summary["tail"][n]
        assert set(row["freq"]) == {"0.02", "0.05"}
        assert all(0 <= f <= 1 for f in row["freq"].values())


def test_empty_ball_monotone_in_c():
    fr = [probe_empty_ball(cfg(n_values=(200,), trials=30, c_ball=c, seed=4)).summary["fraction"]["200"]
          for c in (0.3, 0.6, 1.0, 2.0)]
    assert fr == sorted(fr, reverse=True)


def test_empty_ball_covering_radius():
    n, d = 50, 2
    pts = gen_uniform(0, 0, n, d).points
    centers, _ = ball_centers(n, d)
    assert not has_empty_ball(pts, math.sqrt(d) + 1e-9, centers)
    with pytest.raises(InputError):
        probe_empty_ball(cfg(c_ball=0.0))


def test_longest_edge():
    res = probe_longest_edge(cfg(d=1, n_values=(2, 50), trials=4))
    for r in res.records:
        if r.functional == "MST_max_degree" and r.n == 50:
            assert r.value <= 2
    two = gen_uniform(0, 0, 2, 2)
    assert build_mst(two).longest_edge == pytest.approx(np.linalg.norm(two.points[0] - two.points[1]))


def test_cone_examples():
    assert cone_factor(math.pi / 6) == pytest.approx(math.sqrt(3))
    x = np.array([[0.3]])
    y = np.array([[0.9]])
    v = np.array([[0.0]])
    assert cone_violations(x, y, v, math.pi / 6, 2.0) == (0, 0)
    with pytest.raises(InputError):
        probe_cone(10, 1.2, 0)
    with pytest.raises(InputError):
        probe_cone(10, 0.0, 0)


def test_cone_random_small():
    res = probe_cone(5000, math.pi / 3, 1, d=3, p=3.0)
    assert res.summary["violations"] == 0


def test_additivity_trivial_cases():
    X = gen_uniform(0, 0, 5, 2).points
    assert subadditivity_margin(X, X, 1.0, 12) >= 0
    Z = np.array([[0.2, 0.2], [0.3, 0.4]])
    # every point lands in the low half
    assert superadditivity_margin(Z, 0, 0.9, 1.0, 12) >= -1e-9


def test_additivity_small_run():
    res = probe_additivity(20, 6, 0, d=2, p=2.0)
    assert res.summary["subadditivity_violations"] == 0
    assert res.summary["superadditivity_violations"] == 0
    with pytest.raises(InputError):
        probe_additivity(5, 13, 0)
