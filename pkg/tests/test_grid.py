import math

import numpy as np
import pytest

from foliage.geometry import AliasingError, MetricNotPositiveError, build_cache
from foliage.probes import (gap_inequality_probe, leaf_scalar_curvature, omega_field,
                            omega_sup_norm, scalar_curvature_eps, verify_grid)
from foliage.torus import (TorusModelError, flat_torus, load_torus, product_model,
                           random_torus, sine_model, torus_from_dict, torus_to_dict)
from foliage.trig import TrigPolyField, spectral_derivative


def test_flat_cache_is_trivial():
    c = build_cache(flat_torus(), 8)
    assert np.abs(c.conn).max() == 0 and np.abs(c.S_tensor()).max() == 0
    assert np.abs(c.omega_coord()).max() == 0
    assert omega_sup_norm(c) == 0.0


def test_sine_omega_closed_form():
    N = 16
    c = build_cache(sine_model(0.5), N)
    Wc, Wf = omega_field(c)
    x = np.arange(N) / N
    expect = math.pi * np.cos(2 * np.pi * x) / (1 + 0.5 * np.sin(2 * np.pi * x))
    W1 = Wc[..., 0, :, :].reshape(N, 2, 2)
    assert np.allclose(W1, expect[:, None, None] * np.eye(2), atol=1e-12)
    assert np.abs(Wc[..., 1, :, :]).max() < 1e-14
    assert np.allclose(Wf[..., 0, :, :].reshape(N, 2, 2), W1, atol=1e-12)


def test_sine_S_exchanges_blocks():
    c = build_cache(sine_model(0.5), 8)
    S = c.S_tensor()
    assert np.abs(S).max() > 0.1
    assert np.abs(S + np.swapaxes(S, -1, -2)).max() < 1e-12


def test_omega_sup_norm_closed_form_at_grid():
    N = 16
    c = build_cache(sine_model(0.5), N)
    x = np.arange(N) / N
    expect = np.max(np.pi * np.abs(np.cos(2 * np.pi * x)) / (1 + 0.5 * np.sin(2 * np.pi * x)))
    assert abs(omega_sup_norm(c) - expect) < 1e-12


def test_omega_sup_norm_refined_is_resolution_stable():
    m = sine_model(0.5)
    a = omega_sup_norm(build_cache(m, 16), refine=True)
    b = omega_sup_norm(build_cache(m, 32), refine=True)
    assert abs(a - b) < 1e-6


def test_omega_linear_in_small_sigma():
    vals = [omega_sup_norm(build_cache(sine_model(s), 16), refine=True) for s in (0.1, 0.05)]
    for s, v in zip((0.1, 0.05), vals):
        assert abs(v / (2 * math.pi * s) - 1) < 0.1


@pytest.mark.parametrize("model", [flat_torus(), sine_model(0.5), random_torus(2),
                                   product_model()])
def test_verify_grid_identities(model):
    assert verify_grid(model, 8).passed


def test_fourier_derivative_matches_exact():
    f = TrigPolyField(3, {(1, 0, 2): (0.3, -0.2), (0, 1, 0): (0.0, 1.5)})
    N = 12
    for k in range(3):
        assert np.abs(spectral_derivative(f.sample((N,) * 3), k)
                      - f.derivative(k).sample((N,) * 3)).max() < 1e-12


def test_product_metric_scalar_curvature_splits():
    from foliage.torus import CoordFoliatedTorus, _diag

    m = product_model()
    eps = 0.25
    shape = (8,) * 4
    k = np.broadcast_to(build_cache(m.with_eps(eps), 8).scalar_curvature(), shape)
    ident_F, ident_P = _diag(4, 2), _diag(4, 2)
    leaf_only = CoordFoliatedTorus(2, 2, m.GF, ident_P, 1.0)
    perp_only = CoordFoliatedTorus(2, 2, ident_F, m.GP, 1.0)
    kF = np.broadcast_to(build_cache(leaf_only, 8).scalar_curvature(), shape)
    kP = np.broadcast_to(build_cache(perp_only, 8).scalar_curvature(), shape)
    assert np.abs(kF).max() > 1e-3 and np.abs(kP).max() > 1e-3
    assert np.abs(k - (kF + eps * kP)).max() < 1e-10
    assert np.abs(kF - np.broadcast_to(leaf_scalar_curvature(build_cache(m, 8)), shape)).max() < 1e-10


def test_scalar_curvature_eps_extrapolates():
    mins = {e: scalar_curvature_eps(build_cache(sine_model(0.5).with_eps(e), 16))[1]
            for e in (1, 0.25, 0.0625, 0.015625)}
    # Richardson extrapolation assuming linear dependence on eps (ratio 4)
    lim = mins[0.015625] + (mins[0.015625] - mins[0.0625]) / 3
    assert abs(mins[0.015625] - lim) < 1e-3


def test_gap_probe_flat_sigma_zero_and_stability():
    fam = lambda s: sine_model(s)
    rows, rep = gap_inequality_probe(fam, [0.1, 0.05], [0.0625, 0.015625], 16)
    assert rep.passed
    assert {r["sigma"] for r in rows} == {0.1, 0.05}
    flat = build_cache(flat_torus().with_eps(0.0625), 8)
    assert abs(scalar_curvature_eps(flat)[1]) < 1e-14


def test_errors():
    with pytest.raises(AliasingError):
        build_cache(sine_model(0.5), 2)
    with pytest.raises(MetricNotPositiveError):
        build_cache(sine_model(1.5), 8)
    with pytest.raises(TorusModelError):
        torus_from_dict({"kind": "torus", "p": 2, "q": 2, "GF": [[[]]], "GP": []})


def test_torus_file_roundtrip(tmp_path):
    import json
    m = random_torus(4, axes=(0, 2))
    path = tmp_path / "t.json"
    path.write_text(json.dumps(torus_to_dict(m)))
    again = load_torus(path)
    assert torus_to_dict(again) == torus_to_dict(m)
