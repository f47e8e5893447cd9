"""Backend selection for the hot kernels.

The compiled ``_core`` extension is used when importable; set ``PALAB_PURE=1``
to force the pure-Python twin (same results, slower).
"""
import os

from . import _core_py

if os.environ.get("PALAB_PURE"):
    _impl = _core_py
else:
    try:
        from . import _core as _impl
    except ImportError:  # extension not built
        _impl = _core_py

BACKEND = _impl.BACKEND
prim_dense = _impl.prim_dense
prim_knn = _impl.prim_knn
bnb_solve = _impl.bnb_solve

BACKENDS = {"python": _core_py}
try:
    from . import _core as _compiled

    BACKENDS["cython"] = _compiled
except ImportError:
    pass
