import numpy as np
import pytest

from palab import kernels
from palab.exact import exact_pa, exact_pa_boundary
from palab.graphs import ReplacementWorkspace, build_mst, mst_edges
from palab.instances import gen_uniform

py = kernels.BACKENDS["python"]
cy = kernels.BACKENDS.get("cython")
needs_ext = pytest.mark.skipif(cy is None, reason="compiled core not built")


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.BACKENDS[kernels.BACKEND].prim_dense is kernels.prim_dense


@needs_ext
@pytest.mark.parametrize("n,d", [(2, 1), (40, 2), (300, 3), (3000, 2)])
def test_mst_parity(n, d):
    inst = gen_uniform(17, 0, n, d, 1.0)
    a = mst_edges(inst.points, backend=py)
    b = mst_edges(inst.points, backend=cy)
    assert np.array_equal(a[0], b[0])
    assert np.array_equal(a[1], b[1])


@needs_ext
@pytest.mark.parametrize("seed", range(15))
def test_exact_parity(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    d = int(rng.integers(1, 4))
    p = float(rng.choice([1.0, 2.0, 3.0]))
    inst = gen_uniform(seed, 1, n, d, p)
    a = exact_pa(inst, backend=py)
    b = exact_pa(inst, backend=cy)
    assert a.powers.tolist() == b.powers.tolist()
    assert a.meta["nodes"] == b.meta["nodes"]
    ab = exact_pa_boundary(inst, backend=py)
    bb = exact_pa_boundary(inst, backend=cy)
    assert ab.powers.tolist() == bb.powers.tolist()


@needs_ext
def test_replacement_parity():
    inst = gen_uniform(3, 0, 200, 2, 1.0)
    wa = ReplacementWorkspace(inst.points, backend=py)
    wb = ReplacementWorkspace(inst.points, backend=cy)
    q = np.array([0.31, 0.77])
    for v in (0, 57, 199):
        assert wa.totals(v, q, 1.0) == wb.totals(v, q, 1.0)


def test_pure_fallback_runs():
    inst = gen_uniform(2, 0, 50, 2, 2.0)
    assert build_mst(inst, backend=py).total == pytest.approx(build_mst(inst).total, rel=1e-12)
