"""Backend selection for the pointwise fibre kernels.

The compiled extension is used when it imports; setting the environment
variable ``FOLIAGE_PURE_PYTHON=1`` forces the numpy fallback.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

from . import _fallback

if os.environ.get("FOLIAGE_PURE_PYTHON", "") not in ("", "0"):
    _impl, BACKEND = _fallback, "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl, BACKEND = _fallback, "python"


def backends():
    """Available implementations by name."""
    out = {"python": _fallback, "python-indexed": _fallback}
    try:
        from . import _kernels
        out["compiled"] = _kernels
    except ImportError:
        pass
    return out


@lru_cache(maxsize=32)
def index_map(field_shape, full_shape):
    """Flat index into a field of ``field_shape`` (1 on broadcast axes) for
    every point of ``full_shape``."""
    ids = np.arange(int(np.prod(field_shape)), dtype=np.int64).reshape(field_shape)
    return np.ascontiguousarray(np.broadcast_to(ids, full_shape).ravel())


def pointwise_apply(Ms, us, out=None, backend=None):
    """``out += sum_k Ms[k](x) @ us[k](x)``.

    Each ``Ms[k]`` has shape ``field_shape + (d, d)`` broadcasting against
    ``us[k]`` of shape ``full_shape + (d,)``; a single array may be passed
    instead of a list.  Returns ``out`` (zeros when None).
    """
    if not isinstance(Ms, (list, tuple)):
        Ms, us = [Ms], [us]
    backend = backend or BACKEND
    full = us[0].shape[:-1]
    d = us[0].shape[-1]
    if out is None:
        out = np.zeros(full + (d,), dtype=np.complex128)
    if backend == "python":
        _fallback.broadcast_accumulate(Ms, us, out)
        return out
    impl = backends()[backend]
    fshape = np.broadcast_shapes(*[M.shape[:-2] for M in Ms])
    if len(fshape) != len(full):
        raise ValueError("field and section grids have different dimensions")
    idx = index_map(tuple(fshape), tuple(full))
    of = out.reshape(-1, d)
    if not np.shares_memory(of, out):
        raise ValueError("output must be C-contiguous")
    Mf = [np.ascontiguousarray(np.broadcast_to(M, fshape + (d, d)).reshape(-1, d, d),
                               dtype=np.complex128) for M in Ms]
    uf = [np.ascontiguousarray(u, dtype=np.complex128).reshape(-1, d) for u in us]
    impl.matvec_accumulate(Mf, idx, uf, of)
    return out
