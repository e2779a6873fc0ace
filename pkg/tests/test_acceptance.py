"""Acceptance criteria.  Each test prints one PASS/FAIL line with the
measured value, the tolerance and the runtime, then asserts.

    pytest tests/test_acceptance.py -v
    python3 tests/test_acceptance.py
"""

import random
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from foliage import (abelian, almost_riemannian_check, characteristic_pairings,
                     clifford_relations_report, construct_ar_structure, flat_torus,
                     gamma_rescale_scaling_law, gap_inequality_probe, kodaira_thurston,
                     lichnerowicz_residual, low_spectrum, operator_structure_report,
                     random_almost_isometric, random_models, random_torus, sine_model,
                     verify_frame_suite)
from foliage.cli import lattice_eigenvalues
from foliage.geometry import build_cache
from foliage.subdirac import operators, squared

LINES = []


@pytest.fixture
def emit(capsys):
    def _emit(name, ok, detail, seconds):
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail} [{seconds:.1f} s]"
        LINES.append(line)
        with capsys.disabled():
            print("\n" + line)
        return ok
    return _emit


def test_exact_frame_suite(emit):
    t0 = time.perf_counter()
    models = [abelian(), kodaira_thurston((3, 4)), kodaira_thurston((1, 4))]
    models += random_models(2024, 100, dims=((4, 2), (6, 2), (6, 4)))
    failed = [m.name for m in models if not verify_frame_suite(m).passed]
    dt = time.perf_counter() - t0
    ok = not failed and dt <= 120
    emit("exact frame suite", ok,
         f"{len(models) - len(failed)}/{len(models)} models exact, limit 120 s"
         + (f"; failing {', '.join(failed[:5])}" if failed else ""), dt)
    assert ok


def test_clifford_suite(emit):
    t0 = time.perf_counter()
    cases = [(2, 2), (2, 4), (4, 2), (4, 4)]
    bad = [(p, q) for p, q in cases if not clifford_relations_report(p, q).passed]
    bad += [(p, q, "phi") for p, q in cases
            if not clifford_relations_report(p, q, phi=[("ext", 1, 1)]).passed]
    dt = time.perf_counter() - t0
    ok = not bad and dt <= 10
    emit("Clifford suite", ok, f"(p, q) in {cases} exact, failures {bad}, limit 10 s", dt)
    assert ok


def test_lichnerowicz_identity(emit):
    t0 = time.perf_counter()
    flat = lichnerowicz_residual(flat_torus(), [8, 16])
    ok = max(flat.values()) <= 1e-10
    parts = [f"flat max r = {max(flat.values()):.2e} (<= 1e-10)"]
    m = sine_model(0.5)
    for eps in (None, 1.0, 0.25, 0.0625):
        r = lichnerowicz_residual(m, [8, 16, 32], eps=eps)
        ratio = r[32] / r[16]
        ok &= ratio < 1e-2 and r[32] < 1e-6
        tag = "unscaled" if eps is None else f"eps={Fraction(eps)}"
        parts.append(f"{tag}: r(32)/r(16) = {ratio:.2e}, r(32) = {r[32]:.2e}")
    dt = time.perf_counter() - t0
    ok &= dt <= 600
    emit("Lichnerowicz identity", ok, "; ".join(parts) + "; limits 1e-2, 1e-6, 600 s", dt)
    assert ok


def test_operator_structure(emit):
    t0 = time.perf_counter()
    rep, worst = operator_structure_report(sine_model(0.5), 16, trials=50)
    dt = time.perf_counter() - t0
    emit("operator structure", rep.passed,
         f"grading {worst['grading']:.2e} (<= 1e-9), symmetry "
         f"{worst['D_sym']:.2e} (<= 1e-8), min <-Delta u, u>/|u|^2 "
         f"{worst['psd']:.2e} (>= -1e-8), N=16, 50 sections", dt)
    assert rep.passed


def test_flat_spectrum(emit):
    t0 = time.perf_counter()
    m = flat_torus()
    op = squared(operators(m, build_cache(m, 8), K=0.0)["D"])
    lam = np.asarray(low_spectrum(op, 10))
    ref = lattice_eigenvalues(m, 8, 10, op.d)
    err = float(np.max(np.abs(lam - ref)))
    dt = time.perf_counter() - t0
    ok = err <= 1e-6 and len(lam) == 10
    emit("flat spectrum", ok, f"10 smallest eigenvalues of D^2, max error {err:.2e} (<= 1e-6)",
         dt)
    assert ok


def test_appendix_scaling_law(emit):
    t0 = time.perf_counter()
    rng = random.Random(3)
    models = [random_almost_isometric(rng, n=rng.choice([4, 5, 6]), name=f"ai{k:02d}")
              for k in range(50)]
    law = [m.name for m in models if not gamma_rescale_scaling_law(m)[0].passed]
    cert = [m.name for m in models
            if not almost_riemannian_check(construct_ar_structure(m))[0].passed]
    dt = time.perf_counter() - t0
    ok = not law and not cert and dt <= 60
    emit("appendix scaling law", ok,
         f"exact |omega_gamma| = sqrt(gamma)|omega| on {50 - len(law)}/50, certified "
         f"{50 - len(cert)}/50, limit 60 s", dt)
    assert ok


def test_chern_weil_suite(emit):
    t0 = time.perf_counter()
    models = [flat_torus(), sine_model(0.5), random_torus(1, axes=(0, 1, 2)),
              random_torus(2, axes=(0, 1, 2))]
    closure = pairing = drift = 0.0
    for m in models:
        coarse, fine = (characteristic_pairings(m, N) for N in (16, 32))
        closure = max(closure, max(fine.closure.values()))
        pairing = max(pairing, max(abs(v) for r in (coarse, fine) for v in r.values.values()))
        drift = max(drift, max(abs(fine.values[k] - coarse.values[k]) for k in fine.values))
    dt = time.perf_counter() - t0
    ok = closure <= 1e-6 and pairing <= 1e-7 and drift <= 1e-7
    emit("Chern-Weil suite", ok,
         f"max |d form| {closure:.2e} (<= 1e-6), max |pairing| {pairing:.2e} (<= 1e-7), "
         f"N 16 -> 32 drift {drift:.2e} (<= 1e-7)", dt)
    assert ok


def test_gap_probe_substitute(emit):
    t0 = time.perf_counter()
    rows, rep = gap_inequality_probe(lambda s: sine_model(s), [0.1, 0.05],
                                     [0.0625, 0.015625], 16)
    fits = [(c.model, c.lhs, c.rhs) for c in rep.checks if c.check ==
            "fitted_C_stable_across_eps"]
    dt = time.perf_counter() - t0
    emit("spectral-gap substitute", rep.passed,
         "gap conclusion and nonzero-index contrapositive not reproducible on tori; "
         "fitted C (min, max) over eps: "
         + ", ".join(f"{s}: {lo}, {hi}" for s, lo, hi in fits) + " (within factor 2)", dt)
    assert rep.passed


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
