import numpy as np
import pytest

from foliage.clifford import (PhiBundleSpec, build_ext_rep, build_fiber, build_spin_rep,
                              clifford_relations_report, curvature_lift, lift_connection,
                              s_correction)
from foliage.geometry import build_cache
from foliage.torus import flat_torus, random_torus, sine_model


@pytest.mark.parametrize("p,q", [(2, 2), (2, 4), (4, 2), (4, 4)])
def test_relation_suite(p, q):
    rep = clifford_relations_report(p, q)
    assert rep.passed, [c.check for c in rep.failures()]


def test_relation_suite_with_phi():
    assert clifford_relations_report(2, 2, phi=[("ext", 1, 1), ("sym", 2, 1)]).passed


def test_spin_p2():
    sp = build_spin_rep(2)
    assert sp.gamma.shape == (2, 2, 2)
    assert sorted(np.linalg.eigvalsh(sp.grading).round(12)) == [-1, 1]
    prod = sp.gamma[0] @ sp.gamma[1]
    assert np.array_equal(prod @ prod, -np.eye(2))


def test_odd_rank_rejected():
    with pytest.raises(ValueError):
        build_spin_rep(3)
    with pytest.raises(ValueError):
        build_ext_rep(1)


def test_ext_q2():
    ex = build_ext_rep(2)
    assert ex.dim == 4
    plus, minus = ex.eigenspaces()
    assert plus.shape[1] == minus.shape[1] == 2
    c, ch = ex.c, ex.chat
    assert np.array_equal(c[0] @ ch[1] + ch[1] @ c[0], np.zeros((4, 4)))


def test_tau_q4_exact_entries():
    tau = build_ext_rep(4).tau
    vals = set(np.round(tau.ravel(), 12))
    assert vals <= {0, 1, -1, 1j, -1j}
    assert np.array_equal(tau @ tau, np.eye(16))


def test_fiber_p2q2():
    fb = build_fiber(2, 2)
    assert fb.dim == 8
    even = int(round(np.trace((np.eye(8) + fb.grading) / 2).real))
    assert even == 4
    cf, ch = fb.cF[0], fb.cP[0]
    assert np.array_equal(cf @ ch + ch @ cf, np.zeros((8, 8)))


def test_phi_rank():
    assert PhiBundleSpec(4, (("ext", 2, 1), ("sym", 2, 2))).rank == 6 + 2 * 10
    with pytest.raises(ValueError):
        PhiBundleSpec(2, (("ext", 3, 1),))


def test_curvature_lift_examples():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((2, 2))
    R = A - A.T
    triv = PhiBundleSpec(2)
    assert np.abs(curvature_lift(R, triv)).max() == 0
    ident = PhiBundleSpec(2, (("ext", 1, 1),))
    assert np.allclose(curvature_lift(R, ident), R)
    top = PhiBundleSpec(2, (("ext", 2, 1),))
    # Lambda^2 of a rank-2 bundle: the lift acts by the trace
    assert np.allclose(curvature_lift(A, top), np.trace(A))


def test_curvature_lift_additive_and_leibniz():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((4, 4))
    R = A - A.T
    s1 = PhiBundleSpec(4, (("ext", 1, 1),))
    s2 = PhiBundleSpec(4, (("sym", 2, 1),))
    both = PhiBundleSpec(4, (("ext", 1, 1), ("sym", 2, 1)))
    L = curvature_lift(R, both)
    assert np.allclose(L[:4, :4], curvature_lift(R, s1))
    assert np.allclose(L[4:, 4:], curvature_lift(R, s2))
    # derivation: the lift is a Lie algebra homomorphism
    B = rng.standard_normal((4, 4))
    S = B - B.T
    lhs = curvature_lift(R @ S - S @ R, s2)
    LR, LS = curvature_lift(R, s2), curvature_lift(S, s2)
    assert np.allclose(lhs, LR @ LS - LS @ LR)


def test_lift_connection_flat_and_skew():
    fb = build_fiber(2, 2)
    A = lift_connection(build_cache(flat_torus(), 8), fb)
    assert np.abs(A).max() == 0
    for m in (sine_model(0.5), random_torus(3, axes=(0, 2))):
        c = build_cache(m, 8)
        A = lift_connection(c, fb) + s_correction(c, fb)
        assert np.abs(A + np.conj(np.swapaxes(A, -1, -2))).max() < 1e-10


def test_lift_only_along_x1_for_x1_metrics():
    fb = build_fiber(2, 2)
    # isotropic GP = f(x1) I: the F-perp connection is zero in the symmetric frame
    A = lift_connection(build_cache(sine_model(0.5), 8), fb)
    assert np.abs(A).max() < 1e-14
    c = build_cache(random_torus(6, axes=(0,), amp=0.2), 8)
    ext = np.einsum("...mab,abij->...mij", c.conn[..., 2:, 2:], fb.ext_generators)
    assert np.abs(ext[..., 0, :, :]).max() > 1e-3
    assert np.abs(ext[..., 1:, :, :]).max() < 1e-14


def test_connection_lift_preserves_grading():
    fb = build_fiber(2, 2, phi=[("ext", 1, 1)])
    c = build_cache(random_torus(5, axes=(0, 1)), 8)
    A = lift_connection(c, fb)
    G = fb.grading
    assert np.abs(A @ G - G @ A).max() < 1e-10


def test_mismatched_dimensions():
    with pytest.raises(ValueError):
        lift_connection(build_cache(flat_torus(), 8), build_fiber(2, 4))
