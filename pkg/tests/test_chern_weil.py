import math
from fractions import Fraction

import numpy as np
import pytest

from foliage import (a_hat_form, ch_form, characteristic_pairings, euler_form, flat_torus,
                     l_form, pontryagin_forms, random_torus)
from foliage.chern_weil import A_HAT, L_SERIES, FormField, curvature_forms
from foliage.geometry import build_cache


def _const_curvature(n, blocks):
    """Constant matrix 2-form with ``R[i][j] = sum c dx^a dx^b`` and ``R[j][i] = -R[i][j]``."""
    r = 1 + max(max(i, j) for (i, j) in blocks)
    comps = {}
    for (i, j), terms in blocks.items():
        for (a, b), c in terms.items():
            k = 1 << a | 1 << b
            M = comps.setdefault(k, np.zeros((r, r)))
            s = 1 if a < b else -1
            M[i, j] += s * c
            M[j, i] -= s * c
    return FormField(n, comps, matrix=True)


def test_rank_two_pontryagin_is_euler_squared():
    R = _const_curvature(4, {(0, 1): {(0, 1): 1.0, (2, 3): 1.0}})
    (p1,) = pontryagin_forms(R)
    e = euler_form(R)
    assert np.isclose(p1.top(), e.wedge(e).top())
    assert np.isclose(p1.top(), 2.0 / (4 * math.pi ** 2))


def test_pontryagin_sign_convention():
    R = _const_curvature(4, {(0, 1): {(0, 1): 1.0, (2, 3): 1.0}})
    (p1,) = pontryagin_forms(R)
    trR2 = R.wedge(R).trace().top()
    assert np.isclose(p1.top(), -trR2 / (8 * math.pi ** 2))


def test_series_coefficients():
    assert A_HAT[1] == (Fraction(-1, 24),)
    assert A_HAT[2] == (Fraction(7, 5760), Fraction(-4, 5760))
    assert L_SERIES[1] == (Fraction(1, 3),)
    assert L_SERIES[2] == (Fraction(-1, 45), Fraction(7, 45))


def test_series_in_dimension_four():
    R = _const_curvature(4, {(0, 1): {(0, 1): 0.7, (2, 3): -1.3}, (2, 3): {(0, 2): 0.4, (1, 3): 0.9}})
    (p1,) = pontryagin_forms(R)
    assert abs(p1.top()) > 1e-3
    assert np.isclose(a_hat_form(R).top(), -p1.top() / 24)
    assert np.isclose(l_form(R).top(), p1.top() / 3)
    assert np.isclose(a_hat_form(R).comps[0], 1.0)


def test_chern_character_degree_four_matches_p1():
    R = _const_curvature(4, {(0, 1): {(0, 1): 0.5, (2, 3): 2.0}, (1, 2): {(0, 3): 0.3}})
    (p1,) = pontryagin_forms(R)
    ch = ch_form(R)
    assert np.isclose(ch.comps[0], R.rank)
    assert np.isclose(ch.top(), p1.top())
    assert ch.component(2).sup_norm() == 0.0


def test_euler_requires_even_rank():
    R = _const_curvature(4, {(0, 2): {(0, 1): 1.0}})
    with pytest.raises(ValueError, match="even rank"):
        euler_form(R)


def test_non_skew_curvature_rejected():
    bad = FormField(4, {0b11: np.array([[1.0, 0.0], [0.0, 0.0]])}, matrix=True)
    with pytest.raises(ValueError, match="skew"):
        pontryagin_forms(bad)
    with pytest.raises(ValueError, match="skew"):
        ch_form(bad)


def test_exterior_derivative_squares_to_zero():
    m = random_torus(3, axes=(0, 1, 2))
    RF, RP, RT = curvature_forms(build_cache(m, 16))
    entry = FormField(4, {k: v[..., 0, 1] for k, v in RP.comps.items()})
    assert entry.d().d().sup_norm() < 1e-8


def test_flat_model_forms_vanish():
    r = characteristic_pairings(flat_torus(), 8)
    assert all(v == 0.0 for v in r.values.values())
    assert all(v == 0.0 for v in r.closure.values())


@pytest.mark.parametrize("seed", [1, 2])
def test_three_axis_closure_and_vanishing(seed):
    m = random_torus(seed, axes=(0, 1, 2))
    RF, RP, RT = curvature_forms(build_cache(m, 16))
    assert RP.sup_norm() > 1e-3 and RT.sup_norm() > 1e-3
    r = characteristic_pairings(m, 16)
    assert max(r.closure.values()) <= 1e-6
    assert max(abs(v) for v in r.values.values()) <= 1e-7


def test_pairings_stable_under_refinement():
    m = random_torus(1, axes=(0, 1, 2))
    coarse = characteristic_pairings(m, 8)
    fine = characteristic_pairings(m, 16)
    assert coarse.values.keys() == fine.values.keys()
    for k in fine.values:
        assert abs(fine.values[k] - coarse.values[k]) <= 1e-7
    assert max(fine.closure.values()) < max(coarse.closure.values())


def test_rows_layout():
    r = characteristic_pairings(random_torus(1, axes=(0, 1, 2)), 8, phi=[("sym", 2, 1)])
    rows = r.rows()
    assert {row["phi"] for row in rows} == {"1sym2"}
    assert any(row["quantity"].startswith("d(") for row in rows)
