import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial.distance import pdist, squareform

from palab import Instance, Params
from palab.errors import InputError
from palab.graphs import (ReplacementWorkspace, build_mst, induced_graph, induced_power, is_connected_pa,
                          mst_edges, pt_heuristic, sandwich_check)
from palab.instances import gen_uniform


def scipy_mst_total(points, p):
    D = squareform(pdist(points))
    T = minimum_spanning_tree(D).toarray()
    return float((T[T > 0] ** p).sum()), T


def test_three_points_on_a_line(line3):
    m = build_mst(line3)
    assert m.total == pytest.approx(0.5)
    assert m.edges.tolist() == [[0, 1], [1, 2]]
    pt = pt_heuristic(line3, m)
    assert pt.value == pytest.approx(0.75)
    assert pt.powers.tolist() == pytest.approx([0.25, 0.25, 0.25])


def test_pt_uses_longest_incident_edge():
    inst = Instance(Params(1, 2.0), np.array([[0.0], [0.2], [1.0]]))
    pt = pt_heuristic(inst)
    assert pt.powers.tolist() == pytest.approx([0.04, 0.64, 0.64])
    assert pt.value == pytest.approx(1.32)


def test_single_point_and_pair():
    one = Instance(Params(2, 1.0), np.array([[0.3, 0.3]]))
    assert build_mst(one).total == 0.0
    assert pt_heuristic(one).value == 0.0
    two = Instance(Params(2, 2.0), np.array([[0.0, 0.0], [0.3, 0.4]]))
    assert pt_heuristic(two).value == pytest.approx(0.5)


@pytest.mark.parametrize("n,d", [(50, 1), (200, 2), (300, 3), (3000, 2), (3000, 1)])
def test_mst_total_matches_scipy(n, d):
    inst = gen_uniform(11, 0, n, d, 1.5)
    m = build_mst(inst)
    ref, _ = scipy_mst_total(inst.points, 1.5)
    assert m.total == pytest.approx(ref, rel=1e-12)
    assert len(m.edges) == n - 1


def test_knn_and_dense_paths_agree():
    from palab import graphs
    inst = gen_uniform(5, 0, 600, 2, 1.0)
    dense = mst_edges(inst.points)
    old = graphs.DENSE_MAX
    graphs.DENSE_MAX = 10
    try:
        sparse = mst_edges(inst.points)
    finally:
        graphs.DENSE_MAX = old
    assert np.array_equal(dense[0], sparse[0])


def test_heavy_light_split():
    inst = gen_uniform(3, 1, 9, 2, 2.0)
    m = build_mst(inst)
    w = np.sort(m.weights)[::-1]
    k = int(np.ceil((inst.n - 1) / 2))
    assert m.heavy == pytest.approx(w[:k].sum())
    assert m.heavy + m.light == pytest.approx(m.total)
    assert m.heavy >= m.light


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.integers(1, 3), st.sampled_from([1.0, 2.0, 3.0]), st.integers(0, 10**6))
def test_pt_is_feasible_and_sandwiched(n, d, p, seed):
    inst = gen_uniform(seed, 0, n, d, p)
    m = build_mst(inst)
    pt = pt_heuristic(inst, m)
    assert is_connected_pa(inst, pt.powers)
    assert m.total - 1e-9 <= pt.value <= 2 * m.total + 1e-9
    # provable: PT <= 2 * (sum of the ceil(n/2) heaviest MST edges)
    assert pt.value <= 2 * m.heaviest_sum(int(np.ceil(n / 2))) + 1e-9


def test_induced_graph_brute_force():
    inst = gen_uniform(2, 0, 12, 2, 2.0)
    rng = np.random.default_rng(1)
    psi = rng.random(12) * 0.3
    W = inst.weights()
    expected = [(i, j) for i in range(12) for j in range(i + 1, 12) if min(psi[i], psi[j]) >= W[i, j]]
    assert sorted(induced_graph(inst, psi)) == expected


def test_induced_power_matches_pt():
    inst = gen_uniform(4, 0, 30, 2, 2.0)
    m = build_mst(inst)
    assert np.allclose(induced_power(inst, m.edges), pt_heuristic(inst, m).powers)


def test_power_validation():
    inst = gen_uniform(4, 0, 3, 2, 2.0)
    with pytest.raises(InputError):
        is_connected_pa(inst, [0.1, 0.1])
    with pytest.raises(InputError):
        is_connected_pa(inst, [0.1, -0.1, 0.1])


def test_instance_rejects_out_of_cube():
    with pytest.raises(InputError):
        Instance(Params(2, 1.0), np.array([[0.5, 1.2]]))
    with pytest.raises(InputError):
        Instance(Params(2, 1.0), np.array([[0.5]]))


def test_sandwich_check_flags_bad_value(line3):
    assert sandwich_check(line3, 0.75)
    assert not sandwich_check(line3, 0.4)


@pytest.mark.parametrize("d", [2, 3])
def test_replacement_workspace_matches_rebuild(d):
    inst = gen_uniform(9, 0, 400, d, 1.0)
    ws = ReplacementWorkspace(inst.points)
    rng = np.random.default_rng(0)
    for victim in rng.choice(400, 5, replace=False):
        q = rng.random(d)
        pts = inst.points.copy()
        pts[victim] = q
        ref = Instance(Params(d, 1.0), pts)
        m = build_mst(ref)
        got_m, got_pt = ws.totals(int(victim), q, 1.0)
        assert got_m == pytest.approx(m.total, rel=1e-12)
        assert got_pt == pytest.approx(pt_heuristic(ref, m).value, rel=1e-12)
