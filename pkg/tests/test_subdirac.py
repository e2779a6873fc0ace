import math

import numpy as np
import pytest

from foliage.clifford import build_fiber
from foliage.geometry import build_cache
from foliage.library import filiform4, kodaira_thurston
from foliage.subdirac import (SpectrumError, assemble_eps_scaled, assemble_subdirac,
                              bochner_laplacian, endomorphism_terms, eps_term_operator,
                              frame_lichnerowicz_check, lichnerowicz_residual,
                              lichnerowicz_rhs, low_spectrum, operator_structure_report,
                              operators, perp_curvature_frame, random_section, squared)
from foliage.torus import flat_torus, random_torus, sine_model

TWO_PI = 2 * math.pi


def plane_wave(N, k, d, rng):
    x = np.arange(N) / N
    grids = np.meshgrid(*([x] * len(k)), indexing="ij")
    phase = np.exp(1j * TWO_PI * sum(ki * g for ki, g in zip(k, grids)))
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return phase[..., None] * v


@pytest.fixture(scope="module")
def flat_ops():
    m = flat_torus()
    return operators(m, build_cache(m, 8))


def test_flat_symbol(flat_ops):
    D, lap = flat_ops["D"], flat_ops["Delta"]
    rng = np.random.default_rng(0)
    for k in [(1, 0, 0, 0), (0, 1, 2, -1), (2, 2, 0, 1)]:
        u = plane_wave(8, k, D.d, rng)
        lam = 4 * math.pi ** 2 * sum(x * x for x in k)
        assert np.abs(D(D(u)) - lam * u).max() < 1e-9 * lam
        assert np.abs(lap(u) + lam * u).max() < 1e-9 * lam


def test_flat_rhs_is_minus_laplacian(flat_ops):
    rng = np.random.default_rng(1)
    u = random_section(flat_ops["D"].full_shape, flat_ops["D"].d, 2, rng)
    assert np.abs(flat_ops["RHS"](u) + flat_ops["Delta"](u)).max() < 1e-12


def test_flat_residual_zero():
    r = lichnerowicz_residual(flat_torus(), [8], trials=2)
    assert r[8] < 1e-10


def test_flat_eps_scaling_of_transverse_frequencies():
    m = flat_torus()
    D, _ = assemble_eps_scaled(m, 0.25, 8)
    rng = np.random.default_rng(2)
    k = (1, 0, 2, 1)
    u = plane_wave(8, k, D.d, rng)
    lam = 4 * math.pi ** 2 * (1 + 0.25 * 5)
    assert np.abs(D(D(u)) - lam * u).max() < 1e-9 * lam


def test_public_handles():
    m = sine_model(0.5)
    c = build_cache(m, 8)
    D = assemble_subdirac(m, c)
    L = bochner_laplacian(m, c)
    R = lichnerowicz_rhs(m, c)
    assert D.d == L.d == R.d == 8 and D.full_shape == (8,) * 4
    with pytest.raises(ValueError):
        D(np.zeros((8, 8, 8, 8, 4)))


@pytest.mark.parametrize("model", [flat_torus(), sine_model(0.5)])
def test_operator_structure(model):
    rep, worst = operator_structure_report(model, 8, trials=4)
    assert rep.passed, rep.failures()


def test_rhs_minus_laplacian_is_zeroth_order():
    m = sine_model(0.5)
    ops = operators(m, build_cache(m, 16))
    D = ops["D"]
    rng = np.random.default_rng(3)
    ratios = []
    for k in (1, 2, 3, 4):
        u = plane_wave(16, (0, k, k, 0), D.d, rng)
        diff = ops["RHS"](u) + ops["Delta"](u)
        ratios.append(D.norm(diff) / D.norm(u))
    # bounded, while the symbol of -Delta grows like k^2
    assert max(ratios) < 2 * min(ratios) + 1.0


def test_phi_terms_match_curvature_lift():
    m = random_torus(8, axes=(2, 3), amp=0.15)
    c = build_cache(m, 8)
    fb = build_fiber(2, 2, phi=[("ext", 1, 1)])
    fb0 = build_fiber(2, 2)
    terms = endomorphism_terms(c, fb)
    Rf = perp_curvature_frame(c)
    assert np.abs(Rf).max() > 1e-3
    c0 = fb0.c_frame()
    expect = np.zeros(terms["phi_PP"].shape[:-2] + (fb.dim, fb.dim), dtype=complex)
    for a in range(4):
        for b in range(4):
            expect = expect + 0.5 * np.einsum("ij,...st->...isjt", c0[a] @ c0[b],
                                              Rf[..., :, :, a, b]).reshape(
                Rf.shape[:-4] + (fb.dim, fb.dim))
    got = terms["phi_FF"] + terms["phi_FP"] + terms["phi_PP"]
    assert np.abs(got - expect).max() < 1e-12
    trivial = endomorphism_terms(c, fb0)
    assert all(np.abs(trivial[k]).max() == 0 for k in ("phi_FF", "phi_FP", "phi_PP"))


def test_eps_one_matches_unscaled():
    m = random_torus(9, axes=(0, 2))
    D1, R1 = assemble_eps_scaled(m, 1.0, 8)
    ops = operators(m, build_cache(m, 8))
    u = random_section(D1.full_shape, D1.d, 2, np.random.default_rng(4))
    assert np.abs(D1(u) - ops["D"](u)).max() < 1e-11
    assert np.abs(R1(u) - ops["RHS"](u)).max() < 1e-9


def test_eps_prefactor_of_pure_transverse_term():
    m = random_torus(8, axes=(2, 3), amp=0.15)
    u = random_section((8,) * 4, 8, 2, np.random.default_rng(5))
    a = eps_term_operator(m, 0.5, 8, ["perp_PP"])(u)
    b = eps_term_operator(m, 0.125, 8, ["perp_PP"])(u)
    assert np.abs(a).max() > 1e-4
    assert np.abs(b - a / 4).max() < 1e-12


@pytest.mark.parametrize("model", [kodaira_thurston((3, 4)), kodaira_thurston((1, 4)),
                                   filiform4()])
@pytest.mark.parametrize("phi", [None, [("ext", 1, 1)]])
def test_frame_lichnerowicz_exact(model, phi):
    assert frame_lichnerowicz_check(model, phi=phi).passed


@pytest.mark.parametrize("model", [kodaira_thurston((3, 4)), filiform4()])
def test_frame_lichnerowicz_detects_missing_term(model):
    phi = [("ext", 1, 1)]
    rep = frame_lichnerowicz_check(model, phi=phi)
    nonzero = [c.check[len("term_"):] for c in rep
               if c.check.startswith("term_") and c.lhs != "0"]
    assert {"scalar", "phi_PP", "perp_PP"} <= set(nonzero)
    for name in nonzero:
        assert not frame_lichnerowicz_check(model, phi=phi, drop=(name,)).passed


def test_sine_residual_decays():
    r = lichnerowicz_residual(sine_model(0.5), [8, 16], trials=1)
    assert r[16] < 1e-2 * r[8]


def test_low_spectrum_minus_laplacian_nonnegative():
    m = sine_model(0.5)
    L = operators(m, build_cache(m, 8), K=0.0)["Delta"]
    from foliage.subdirac import LinearOperatorHandle
    neg = LinearOperatorHandle(lambda u: -L(u), "-Delta", L.full_shape, L.d, L.weight)
    lam = low_spectrum(neg, 4)
    assert lam[0] >= -1e-8
    assert np.all(np.diff(lam) >= -1e-10)


def test_low_spectrum_iteration_cap():
    m = flat_torus()
    D = operators(m, build_cache(m, 8), K=0.0)["D"]
    with pytest.raises(SpectrumError):
        low_spectrum(squared(D), 4, dense_limit=0, maxiter=1, accept=1e-14)
