import math
import random
from fractions import Fraction

import numpy as np
import pytest

from foliage import (almost_isometric_check, almost_riemannian_check, construct_ar_structure,
                     gamma_rescale_scaling_law, random_almost_isometric, sine_model, split_omega)
from foliage.almost import (AlmostIsometricError, constant_family, decay_exponent,
                            omega_norm_value, split_omega_report, torus_family, _float_blocks)
from foliage.frame_checks import omega_tensor


def _random_models(count=50, seed=3):
    rng = random.Random(seed)
    return [random_almost_isometric(rng, n=rng.choice([4, 5, 6]), name=f"r{k}")
            for k in range(count)]


def test_kt34_split_passes(kt34):
    assert almost_isometric_check(kt34).passed
    assert split_omega_report(kt34).passed
    rep, rows = gamma_rescale_scaling_law(kt34)
    assert rep.passed
    assert omega_norm_value(_float_blocks(omega_tensor(kt34))) == 0
    assert [r["gamma"] for r in rows] == [1.0, 0.25, 0.0625]


def test_kt14_split_refused(kt14):
    rep = almost_isometric_check(kt14)
    assert not rep.passed
    with pytest.raises(AlmostIsometricError):
        split_omega(kt14)
    with pytest.raises(AlmostIsometricError):
        construct_ar_structure(kt14)


def test_abelian_split_gives_zero_omega(ab):
    W = split_omega(ab)
    assert all(x == 0 for plane in W for row in plane for x in row)
    rep, norms, slope = almost_riemannian_check(construct_ar_structure(ab))
    assert rep.passed
    assert all(v == 0 for v in norms) and math.isnan(slope)


def test_split_formula_matches_levi_civita_on_random_models():
    for m in _random_models():
        rep = split_omega_report(m)
        assert rep.passed, m.name
        assert omega_norm_value(_float_blocks(omega_tensor(m))) > 0


def test_printed_coefficient_is_not_the_levi_civita_one():
    m = random_almost_isometric(3)
    rows = {r.check: r for r in split_omega_report(m).checks}
    assert not rows["printed_coefficient_one_half"].passed
    assert not rows["printed_coefficient_one_half"].gated


def test_gamma_law_and_certification_on_random_models():
    for m in _random_models():
        rep, rows = gamma_rescale_scaling_law(m)
        assert rep.passed, m.name
        fam = construct_ar_structure(m)
        arep, norms, slope = almost_riemannian_check(fam)
        assert arep.passed, m.name
        assert abs(slope - 0.5) < 1e-9


def test_quarter_gamma_halves_the_norm():
    rep, rows = gamma_rescale_scaling_law(random_almost_isometric(3), gammas=(1, Fraction(1, 4)))
    assert rows[0]["omega_norm"] > 0
    assert rows[1]["omega_norm"] == pytest.approx(rows[0]["omega_norm"] / 2, rel=1e-14)


def test_irrational_gamma():
    rep, rows = gamma_rescale_scaling_law(random_almost_isometric(5), gammas=(1, Fraction(1, 2)))
    assert rep.passed
    assert rows[1]["omega_norm"] == pytest.approx(rows[0]["omega_norm"] / math.sqrt(2))


def test_constant_family_fails(kt14):
    rep, norms, _ = almost_riemannian_check(constant_family(kt14))
    assert not rep.passed
    assert len(set(norms)) == 1 and norms[0] > 0


def test_changing_leaf_metric_detected():
    fam = construct_ar_structure(random_almost_isometric(3))
    fam.leaf_metric = lambda g: ("scaled", float(g))
    rep, _, _ = almost_riemannian_check(fam)
    assert not rep.passed
    assert any(r.check == "leaf_metric_fixed" and not r.passed for r in rep.checks)


def test_sine_torus_family_decays_linearly():
    sched = [0.5 * 2.0 ** -k for k in range(11)]
    fam = torus_family(lambda s: sine_model(sigma=s), sched, N=16)
    rep, norms, slope = almost_riemannian_check(fam)
    assert rep.passed
    assert norms[-1] < 1e-2
    assert slope == pytest.approx(1.0, abs=0.05)


def test_decay_exponent():
    s = [1.0, 0.5, 0.25]
    assert decay_exponent(s, [x ** 1.5 for x in s]) == pytest.approx(1.5)
    assert math.isnan(decay_exponent([1.0], [1.0]))
