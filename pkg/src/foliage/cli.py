"""Command-line front end: ``foliage <suite> [options]``.

Each suite writes ``<suite>.csv`` (one row per check), an optional
``<suite>_data.csv`` with the raw numbers, and ``summary.json`` into
``--out``.  Exit status: 0 when every gated check passes, 1 when one fails,
2 on invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .frames import ModelError, model_from_dict
from .report import Report
from .torus import TorusModelError, torus_from_dict

SUITES = ("verify-frame", "verify-grid", "lichnerowicz", "sweep-eps", "spectrum",
          "charclass", "appendix-check")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    suite: str
    model: list = field(default_factory=list)
    N: list = field(default_factory=lambda: [16])
    eps: list = field(default_factory=list)
    gamma: list = field(default_factory=list)
    sigma: list = field(default_factory=list)
    trials: int = 3
    seed: int = 42
    out: str = "."
    tol: dict = field(default_factory=dict)
    count: int = 10
    maxiter: int = 400
    operator: str = "D2"
    phi: list = field(default_factory=list)
    random: int = 0

    def validate(self):
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}")
        for N in self.N:
            if N < 4 or N > 128 or N & (N - 1):
                raise ConfigError(f"N = {N} must be a power of two in [4, 128]")
        for name in ("eps", "gamma", "sigma"):
            sched = getattr(self, name)
            if any(not (x > 0) for x in sched):
                raise ConfigError(f"--{name} values must be positive")
            if any(b >= a for a, b in zip(sched, sched[1:])):
                raise ConfigError(f"--{name} schedule must be strictly decreasing")
        if self.trials < 1 or self.count < 1 or self.maxiter < 1:
            raise ConfigError("--trials, --count and --maxiter must be positive")
        if not self.model and not (self.suite == "appendix-check" and self.random):
            raise ConfigError("--model is required")
        return self


# ---------------------------------------------------------------------------
# model resolution

def _builtin(name):
    from . import library, torus

    table = {
        "abelian": library.abelian,
        "kt34": lambda: library.kodaira_thurston((3, 4), split=([1], [2])),
        "kt14": lambda: library.kodaira_thurston((1, 4), split=([2], [3])),
        "filiform": library.filiform4,
        "flat": torus.flat_torus,
        "sine": lambda: torus.sine_model(0.5),
    }
    if name not in table:
        raise ConfigError(f"unknown built-in model {name!r}; choose from {sorted(table)}")
    return table[name]()


def load_any(spec):
    """A model file path (frame or torus JSON) or ``builtin:<name>``."""
    if spec.startswith("builtin:"):
        return _builtin(spec.split(":", 1)[1])
    path = Path(spec)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read model file {spec}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{spec} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{spec}: model file must hold a JSON object")
    if data.get("kind") == "torus":
        return torus_from_dict(data)
    return model_from_dict(data)


def _is_torus(m):
    return hasattr(m, "active_axes")


def _need(m, torus, suite):
    if _is_torus(m) != torus:
        want = "a torus (grid) model" if torus else "a frame (Lie algebra) model"
        raise ConfigError(f"{suite} needs {want}; got {m.name}")
    return m


# ---------------------------------------------------------------------------
# output

class Output:
    def __init__(self, cfg):
        self.dir = Path(cfg.out)
        self.suite = cfg.suite
        self.report = Report()
        self.data = []
        self.error = None

    def flush(self):
        self.dir.mkdir(parents=True, exist_ok=True)
        stem = self.suite.replace("-", "_")
        (self.dir / f"{stem}.csv").write_text(self.report.to_csv())
        if self.data:
            keys = list(dict.fromkeys(k for row in self.data for k in row))
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
            w.writeheader()
            for row in self.data:
                w.writerow({k: _fmt(row.get(k, "")) for k in keys})
            (self.dir / f"{stem}_data.csv").write_text(buf.getvalue())
        summary = {
            "suite": self.suite,
            "passed": self.error is None and self.report.passed,
            "error": self.error,
            "checks": [{"model": c.model, "check": c.check, "equation": c.equation,
                        "status": "pass" if c.passed else "fail", "gated": c.gated}
                       for c in self.report],
        }
        (self.dir / "summary.json").write_text(json.dumps(summary, indent=1) + "\n")


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


# ---------------------------------------------------------------------------
# suites

def run_verify_frame(cfg, out):
    from .frame_checks import verify_frame_suite

    for spec in cfg.model:
        m = _need(load_any(spec), False, cfg.suite)
        out.report.extend(verify_frame_suite(m))


def run_verify_grid(cfg, out):
    from .probes import verify_grid

    tol = cfg.tol.get("grid", 1e-10)
    for spec in cfg.model:
        m = _need(load_any(spec), True, cfg.suite)
        for N in cfg.N:
            out.report.extend(verify_grid(m, N, tol=tol))


def _ladder_checks(out, m, res, eps, cfg):
    from .subdirac import _phi_tag

    Ns = sorted(res)
    for N in Ns:
        out.data.append({"model": m.name, "N": N, "epsilon": eps, "phi": _phi_tag(m),
                         "quantity": "lichnerowicz_residual", "value": res[N]})
    tag = f"eps={eps:g}"
    if not m.active_axes():
        tol = cfg.tol.get("flat", 1e-10)
        worst = max(res.values())
        out.report.add("lichnerowicz", "flat_residual", "2.20", worst <= tol, m.name,
                       lhs=f"{worst:.3e}", rhs=f"<= {tol:g}", detail=tag)
        return
    if len(Ns) >= 2:
        ratio = res[Ns[-1]] / res[Ns[-2]] if res[Ns[-2]] > 0 else 0.0
        rtol = cfg.tol.get("ratio", 1e-2)
        out.report.add("lichnerowicz", "spectral_decay_ratio", "2.20", ratio < rtol, m.name,
                       lhs=f"{ratio:.3e}", rhs=f"< {rtol:g}",
                       detail=f"r({Ns[-1]})/r({Ns[-2]}), {tag}")
    atol = cfg.tol.get("residual", 1e-6)
    out.report.add("lichnerowicz", "finest_residual", "2.20", res[Ns[-1]] < atol, m.name,
                   lhs=f"{res[Ns[-1]]:.3e}", rhs=f"< {atol:g}", detail=f"N={Ns[-1]}, {tag}")


def _with_phi(m, cfg):
    return m.with_phi(cfg.phi) if cfg.phi else m


def run_lichnerowicz(cfg, out):
    from .subdirac import lichnerowicz_residual

    for spec in cfg.model:
        m = _with_phi(_need(load_any(spec), True, cfg.suite), cfg)
        eps_list = cfg.eps or [None]
        for e in eps_list:
            res = lichnerowicz_residual(m, cfg.N, trials=cfg.trials, seed=cfg.seed, eps=e)
            _ladder_checks(out, m, res, 1.0 if e is None else e, cfg)


def run_sweep_eps(cfg, out):
    from .probes import gap_inequality_probe
    from .subdirac import lichnerowicz_residual
    from .torus import sine_model

    eps_list = cfg.eps or [1.0, 0.25, 0.0625]
    for spec in cfg.model:
        m = _with_phi(_need(load_any(spec), True, cfg.suite), cfg)
        for e in eps_list:
            res = lichnerowicz_residual(m, cfg.N, trials=cfg.trials, seed=cfg.seed, eps=e)
            _ladder_checks(out, m, res, e, cfg)
        if cfg.sigma:
            fam = lambda s, p=m.p, q=m.q: sine_model(s, p=p, q=q)
            rows, rep = gap_inequality_probe(fam, cfg.sigma, eps_list, max(cfg.N))
            out.data.extend({"model": f"sine_s{r['sigma']:g}", **r} for r in rows)
            out.report.extend(rep)


def lattice_eigenvalues(m, N, count, d):
    """``4 pi^2 k^T g^{-1} k`` with multiplicity ``d`` for a constant metric."""
    from .geometry import build_cache

    Gi = np.asarray(build_cache(m, N).Ginv).reshape(-1, m.n, m.n)[0]
    r = int(math.isqrt(count)) + 2
    vals = []
    for k in np.ndindex(*(2 * r + 1,) * m.n):
        kv = np.array(k) - r
        vals.append(4 * math.pi ** 2 * float(kv @ Gi @ kv))
    vals.sort()
    out = []
    for v in vals:
        out.extend([v] * d)
        if len(out) >= count:
            break
    return np.array(out[:count])


def run_spectrum(cfg, out):
    from .geometry import build_cache
    from .subdirac import (LinearOperatorHandle, _phi_tag, low_spectrum, operators,
                           squared)

    for spec in cfg.model:
        m = _with_phi(_need(load_any(spec), True, cfg.suite), cfg)
        for N in cfg.N:
            ops = operators(m, build_cache(m, N), K=0.0)
            if cfg.operator == "D2":
                op = squared(ops["D"])
            else:
                L = ops["Delta"]
                op = LinearOperatorHandle(lambda u, L=L: -L(u), "-Delta", L.full_shape,
                                          L.d, L.weight)
            lam = low_spectrum(op, cfg.count, seed=cfg.seed, maxiter=cfg.maxiter)
            for i, v in enumerate(lam):
                out.data.append({"model": m.name, "N": N, "epsilon": m.eps,
                                 "phi": _phi_tag(m), "quantity": f"{cfg.operator}_{i}",
                                 "value": float(v)})
            if not m.active_axes():
                ref = lattice_eigenvalues(m, N, cfg.count, op.d)
                err = float(np.max(np.abs(np.asarray(lam) - ref)))
                tol = cfg.tol.get("spectrum", 1e-6)
                out.report.add("spectrum", "flat_lattice_values", "2.17", err <= tol, m.name,
                               lhs=f"{err:.3e}", rhs=f"<= {tol:g}",
                               detail=f"{cfg.operator}, N={N}, {cfg.count} eigenvalues")
            if cfg.operator != "D2":
                lo = float(np.min(lam))
                out.report.add("spectrum", "minus_laplacian_nonnegative", "2.41", lo >= -1e-8,
                               m.name, lhs=f"{lo:.3e}", rhs=">= -1e-08", detail=f"N={N}")


def run_charclass(cfg, out):
    from .chern_weil import characteristic_pairings

    ctol = cfg.tol.get("closure", 1e-6)
    ptol = cfg.tol.get("pairing", 1e-7)
    for spec in cfg.model:
        m = _need(load_any(spec), True, cfg.suite)
        values = {}
        for N in cfg.N:
            rep = characteristic_pairings(m, N, phi=cfg.phi or None)
            out.data.extend(rep.rows())
            for k, v in rep.closure.items():
                out.report.add("charclass", "form_closed", "2.42", v <= ctol, m.name,
                               lhs=f"{v:.3e}", rhs=f"<= {ctol:g}", detail=f"d({k}), N={N}")
            for k, v in rep.values.items():
                out.report.add("charclass", "pairing_vanishes", "2.42", abs(v) <= ptol, m.name,
                               lhs=f"{v:.3e}", rhs=f"<= {ptol:g}", detail=f"{k}, N={N}")
                values.setdefault(k, []).append(v)
        if len(cfg.N) > 1:
            for k, vs in values.items():
                drift = max(vs) - min(vs)
                out.report.add("charclass", "quadrature_stable", "2.42", drift <= ptol, m.name,
                               lhs=f"{drift:.3e}", rhs=f"<= {ptol:g}",
                               detail=f"{k} over N={cfg.N}")


def run_appendix(cfg, out):
    from .almost import (almost_isometric_check, almost_riemannian_check,
                         construct_ar_structure, gamma_rescale_scaling_law,
                         split_omega_report)
    from .library import random_almost_isometric

    models = [_need(load_any(s), False, cfg.suite) for s in cfg.model]
    rng = random.Random(cfg.seed)
    for k in range(cfg.random):
        n = rng.choice([4, 5, 6])
        models.append(random_almost_isometric(rng, n=n, p=2, q1=1, name=f"ai{k:03d}_n{n}"))
    gammas = [Fraction(str(g)) for g in (cfg.gamma or [1, 0.25, 0.0625])]
    for m in models:
        if m.split is None:
            raise ConfigError(f"{m.name} declares no split of the complement")
        rep = almost_isometric_check(m)
        out.report.extend(rep)
        if not rep.passed:
            continue
        out.report.extend(split_omega_report(m))
        law, rows = gamma_rescale_scaling_law(m, gammas)
        out.report.extend(law)
        out.data.extend({"model": m.name, **r} for r in rows)
        ar, _, _ = almost_riemannian_check(construct_ar_structure(m))
        out.report.extend(ar)


RUNNERS = {
    "verify-frame": run_verify_frame,
    "verify-grid": run_verify_grid,
    "lichnerowicz": run_lichnerowicz,
    "sweep-eps": run_sweep_eps,
    "spectrum": run_spectrum,
    "charclass": run_charclass,
    "appendix-check": run_appendix,
}


def run_suite(cfg):
    """Run one suite; returns the exit status.  Reports are written even when
    the run stops on invalid input."""
    out = Output(cfg)
    status = 0
    try:
        cfg.validate()
        RUNNERS[cfg.suite](cfg, out)
        status = 0 if out.report.passed else 1
    except (ConfigError, ModelError, TorusModelError) as exc:
        out.error = str(exc)
        idx = getattr(exc, "indices", None)
        msg = f"invalid input: {exc}"
        if idx:
            msg += f" (indices {', '.join(map(str, idx))})"
        print(msg, file=sys.stderr)
        status = 2
    finally:
        out.flush()
    if status != 2:
        for c in out.report.failures():
            print(f"FAIL {c.suite}/{c.check} [{c.model}] {c.lhs} {c.rhs} {c.detail}",
                  file=sys.stderr)
        n = sum(1 for c in out.report if c.gated)
        print(f"{cfg.suite}: {n - len(out.report.failures())}/{n} gated checks passed")
    return status


# ---------------------------------------------------------------------------
# argument parsing

def _phi_arg(text):
    """``ext1`` / ``2sym2`` style terms separated by '+'."""
    terms = []
    for part in text.split("+"):
        part = part.strip()
        mult = ""
        while part and part[0].isdigit():
            mult, part = mult + part[0], part[1:]
        for kind in ("ext", "sym"):
            if part.startswith(kind) and part[len(kind):].isdigit():
                terms.append((kind, int(part[len(kind):]), int(mult or 1)))
                break
        else:
            raise argparse.ArgumentTypeError(f"bad phi term {part!r} (use ext<k> or sym<k>)")
    return terms


def _tol_arg(text):
    key, _, val = text.partition("=")
    try:
        return key, float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--tol expects name=value, got {text!r}") from None


def build_parser():
    ap = argparse.ArgumentParser(prog="foliage", description=__doc__.splitlines()[0])
    ap.add_argument("suite", choices=SUITES)
    ap.add_argument("--config", help="JSON file with RunConfig fields (flags override it)")
    ap.add_argument("--model", action="append", help="model file or builtin:<name>")
    ap.add_argument("--N", type=int, nargs="+")
    ap.add_argument("--eps", type=float, nargs="+")
    ap.add_argument("--gamma", type=float, nargs="+")
    ap.add_argument("--sigma", type=float, nargs="+")
    ap.add_argument("--trials", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out")
    ap.add_argument("--tol", type=_tol_arg, action="append",
                    help="override a tolerance, e.g. residual=1e-7")
    ap.add_argument("--count", type=int, help="eigenvalues to compute (spectrum)")
    ap.add_argument("--maxiter", type=int, help="eigensolver iteration cap")
    ap.add_argument("--operator", choices=("D2", "minus-laplacian"))
    ap.add_argument("--phi", type=_phi_arg, help="e.g. ext1 or ext1+sym2")
    ap.add_argument("--random", type=int, help="random almost-isometric models to add")
    return ap


def config_from_args(args):
    base = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        known = set(RunConfig.__dataclass_fields__)
        extra = set(base) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
    base["suite"] = args.suite
    for key in ("model", "N", "eps", "gamma", "sigma", "trials", "seed", "out", "count",
                "maxiter", "operator", "phi", "random"):
        val = getattr(args, key)
        if val is not None:
            base[key] = val
    if args.tol:
        base["tol"] = {**base.get("tol", {}), **dict(args.tol)}
    if isinstance(base.get("model"), str):
        base["model"] = [base["model"]]
    return RunConfig(**base)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ConfigError, TypeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    return run_suite(cfg)


if __name__ == "__main__":
    sys.exit(main())
