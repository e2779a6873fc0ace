import os
import subprocess
import sys

import numpy as np
import pytest

from foliage.kernels import BACKEND, backends, index_map, pointwise_apply


def _case(rng, full=(4, 5, 1, 3), fshape=(4, 1, 1, 3), d=4, terms=3):
    Ms = [rng.standard_normal(fshape + (d, d)) + 1j * rng.standard_normal(fshape + (d, d))
          for _ in range(terms)]
    us = [rng.standard_normal(full + (d,)) + 1j * rng.standard_normal(full + (d,))
          for _ in range(terms)]
    return Ms, us


def _reference(Ms, us):
    return sum(np.einsum("...ij,...j->...i", M, u) for M, u in zip(Ms, us))


@pytest.mark.parametrize("backend", sorted(backends()))
def test_backends_match_einsum(backend):
    Ms, us = _case(np.random.default_rng(0))
    out = pointwise_apply(Ms, us, backend=backend)
    assert np.max(np.abs(out - _reference(Ms, us))) < 1e-12


@pytest.mark.parametrize("backend", sorted(backends()))
def test_accumulates_into_out(backend):
    Ms, us = _case(np.random.default_rng(1), terms=1)
    out = np.ones(us[0].shape, dtype=complex)
    pointwise_apply(Ms[0], us[0], out=out, backend=backend)
    assert np.allclose(out, 1 + _reference(Ms, us))


def test_index_map_broadcasts():
    idx = index_map((2, 1), (2, 3))
    assert idx.tolist() == [0, 0, 0, 1, 1, 1]


def test_dimension_mismatch():
    Ms, us = _case(np.random.default_rng(2), terms=1)
    with pytest.raises(ValueError):
        pointwise_apply([Ms[0][0]], us, backend="python-indexed")


def test_compiled_backend_available_by_default():
    assert "compiled" in backends()
    assert BACKEND == "compiled"


def test_environment_variable_forces_fallback():
    env = dict(os.environ, FOLIAGE_PURE_PYTHON="1")
    r = subprocess.run([sys.executable, "-c", "import foliage; print(foliage.BACKEND)"],
                       capture_output=True, text=True, env=env)
    assert r.stdout.strip() == "python"


def test_fallback_gives_same_operator():
    code = ("import numpy as np, foliage\n"
            "from foliage.geometry import build_cache\n"
            "from foliage.subdirac import assemble_subdirac\n"
            "m = foliage.random_torus(1, axes=(0, 1))\n"
            "D = assemble_subdirac(m, build_cache(m, 8))\n"
            "u = np.random.default_rng(0).standard_normal(D.full_shape + (D.d,))\n"
            "np.save('{path}', D.apply(u))\n")
    outs = []
    for flag in ("0", "1"):
        path = f"/tmp/foliage_backend_{flag}.npy"
        env = dict(os.environ, FOLIAGE_PURE_PYTHON=flag)
        r = subprocess.run([sys.executable, "-c", code.format(path=path)],
                           capture_output=True, text=True, env=env)
        assert r.returncode == 0, r.stderr
        outs.append(np.load(path))
    assert np.max(np.abs(outs[0] - outs[1])) < 1e-12
