import json
from fractions import Fraction

import pytest

from foliage.exact import ONE, T, ZERO, evaluate, limit_at_zero
from foliage.frame_checks import (adiabatic_limit_check, bott_connection,
                                  flatness_and_omega_identities, omega_five_term, omega_tensor,
                                  verify_curvature_expansion, verify_frame_suite, verify_omega,
                                  verify_rescaling_laws, verify_s_tensor)
from foliage.frames import (LieFrameModel, ModelError, frame_christoffel, koszul_connection,
                            load_model, model_to_dict, scalar_curvature, unit_connection)
from foliage.library import random_models


def entries(tensor):
    for a in tensor:
        for b in a:
            yield from b


def test_abelian_is_flat(ab):
    table = koszul_connection(ab)
    assert all(g == ZERO for g in entries(table.gamma))
    assert scalar_curvature(ab) == ZERO
    assert all(w == ZERO for w in entries(omega_tensor(ab)))
    assert all(b == ZERO for b in entries(bott_connection(ab)))


def test_kodaira_thurston_koszul_values(kt34):
    # frame order is (e3, e4, e1, e2): e1 -> 2, e2 -> 3, e3 -> 0
    A = frame_christoffel(unit_connection(kt34))
    assert A[2][3][0] == Fraction(1, 2)
    assert A[2][0][3] == Fraction(-1, 2)


def test_connection_table_invariants(kt34, kt14, fil):
    for m in (kt34, kt14, fil):
        table = koszul_connection(m)
        assert table.skew_violations() == []
        assert table.torsion_violations() == []


def test_gamma_entries_are_laurent_with_small_exponents(kt14):
    for g in entries(koszul_connection(kt14).gamma):
        if g:
            assert g.is_laurent()
            assert -1 <= g.valuation() <= 1


def test_bott_connection(kt34, kt14):
    assert all(b == ZERO for b in entries(bott_connection(kt34)))
    B = bott_connection(kt14)
    # frame (e1, e4 | e2, e3): nabla_dot_{e1} e2 = e3
    nz = [(i, u, v) for i in range(2) for u in range(2) for v in range(2) if B[i][u][v]]
    assert nz == [(0, 0, 1)] and B[0][0][1] == ONE


def test_omega_values(kt34, kt14):
    assert all(w == ZERO for w in entries(omega_tensor(kt34)))
    W = omega_tensor(kt14)
    assert W[0][0][1] == -ONE and W[0][1][0] == -ONE
    nz = {(i, u, v) for i in range(2) for u in range(2) for v in range(2) if W[i][u][v]}
    assert nz == {(0, 0, 1), (0, 1, 0)}
    full, tail = omega_five_term(kt14)
    assert all(t == ZERO for t in entries(tail))
    assert full == W


def test_scalar_curvature_kt(kt34, kt14):
    for m in (kt34, kt14):
        k = scalar_curvature(m)
        assert evaluate(k, 1) == Fraction(-1, 2)
    assert not hasattr(limit_at_zero(scalar_curvature(kt34)), "order")


@pytest.mark.parametrize("check", [verify_rescaling_laws, verify_omega, adiabatic_limit_check,
                                   verify_s_tensor, flatness_and_omega_identities])
def test_named_models_pass(check, ab, kt34, kt14, fil):
    for m in (ab, kt34, kt14, fil):
        rep = check(m)
        assert rep.passed, [c.check for c in rep.failures()]


def test_rescaling_laws_has_eight_rows(kt14):
    names = {c.check for c in verify_rescaling_laws(kt14)}
    assert len(names) == 8


def test_curvature_expansion_gated_rows_pass(kt34, kt14):
    for m in (kt34, kt14):
        assert verify_curvature_expansion(m).passed


def test_printed_233_reported_as_ungated_failure():
    from foliage.library import kodaira_thurston
    rep = verify_curvature_expansion(kodaira_thurston((3, 4)))
    printed = [c for c in rep if c.check.endswith("_as_printed")]
    assert printed and all(not c.gated for c in printed)
    assert any(not c.passed for c in printed)


def test_random_models_small_sample():
    for m in random_models(5, 6):
        assert verify_frame_suite(m).passed


def test_model_validation():
    with pytest.raises(ModelError) as err:
        LieFrameModel.from_brackets(4, 2, [(1, 3, 4, 1), (3, 4, 3, 1)])
    assert err.value.indices == (1, 3, 4)
    with pytest.raises(ModelError):
        # F = span{e1, e2} would not be closed
        LieFrameModel.from_brackets(4, 2, [(1, 2, 3, 1)])


def test_model_file_roundtrip(tmp_path, kt14):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(model_to_dict(kt14)))
    again = load_model(path)
    assert again.c == kt14.c and again.split == kt14.split
