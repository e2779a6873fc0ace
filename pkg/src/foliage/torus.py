"""Coordinate-foliated tori ``T^n = T^p x T^q`` with block metrics given by
trigonometric polynomials.  F is spanned by the first ``p`` coordinate fields
and F-perp by the last ``q``.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace

import numpy as np

from .trig import TrigPolyField


class TorusModelError(ValueError):
    pass


@dataclass(frozen=True)
class CoordFoliatedTorus:
    p: int
    q: int
    GF: tuple  # p x p nested tuples of TrigPolyField
    GP: tuple  # q x q
    eps: float = 1.0
    name: str = "torus"
    phi: tuple = ()  # ((kind, k, multiplicity), ...)

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise TorusModelError("p and q must be positive")
        if self.eps <= 0:
            raise TorusModelError("epsilon must be positive")
        for blk, d, tag in ((self.GF, self.p, "GF"), (self.GP, self.q, "GP")):
            if len(blk) != d or any(len(r) != d for r in blk):
                raise TorusModelError(f"{tag} must be {d} x {d}")
            for i in range(d):
                for j in range(d):
                    if blk[i][j].n != self.n:
                        raise TorusModelError(f"{tag}[{i}][{j}] lives on the wrong torus")
                    if blk[i][j].terms != blk[j][i].terms:
                        raise TorusModelError(f"{tag} is not symmetric at ({i + 1}, {j + 1})")

    @property
    def n(self):
        return self.p + self.q

    def entries(self):
        for blk in (self.GF, self.GP):
            for row in blk:
                yield from row

    @property
    def bandwidth(self):
        return max((f.bandwidth for f in self.entries()), default=0)

    def active_axes(self):
        out = set()
        for f in self.entries():
            out |= f.active_axes()
        return sorted(out)

    def with_eps(self, eps):
        return replace(self, eps=float(eps))

    def with_phi(self, phi):
        return replace(self, phi=tuple(tuple(x) for x in phi))


# ---------------------------------------------------------------------------
# constructors

def _const(n, v):
    return TrigPolyField.constant(n, v)


def _diag(n, d, fields=None):
    fields = fields or [_const(n, 1.0)] * d
    zero = TrigPolyField(n)
    return tuple(tuple(fields[i] if i == j else zero for j in range(d)) for i in range(d))


def flat_torus(p=2, q=2, eps=1.0):
    n = p + q
    return CoordFoliatedTorus(p, q, _diag(n, p), _diag(n, q), eps, name=f"flat_T{n}")


def sine_model(sigma=0.5, axis=0, p=2, q=2, eps=1.0, name=None):
    """``GF = I``, ``GP = (1 + sigma sin 2 pi x_axis) I``."""
    n = p + q
    k = [0] * n
    k[axis] = 1
    f = TrigPolyField(n, {(0,) * n: (1.0, 0.0), tuple(k): (0.0, sigma)})
    return CoordFoliatedTorus(p, q, _diag(n, p), _diag(n, q, [f] * q), eps,
                              name=name or f"sine_s{sigma:g}_x{axis + 1}")


def _random_spd_block(rng, n, d, axes, amp, bw):
    """Identity plus a small symmetric trig-polynomial perturbation."""
    rows = [[TrigPolyField(n) for _ in range(d)] for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            terms = {(0,) * n: (1.0 if i == j else 0.0, 0.0)}
            for _ in range(2):
                k = [0] * n
                for a in axes:
                    k[a] = rng.randint(-bw, bw)
                if not any(k):
                    k[rng.choice(axes)] = 1
                terms.setdefault(tuple(k), (0.0, 0.0))
                a0, b0 = terms[tuple(k)]
                terms[tuple(k)] = (a0 + rng.uniform(-amp, amp), b0 + rng.uniform(-amp, amp))
            f = TrigPolyField(n, terms)
            rows[i][j] = rows[j][i] = f
    return tuple(tuple(r) for r in rows)


def random_torus(seed, p=2, q=2, axes=None, amp=0.08, bw=1, eps=1.0, name=None):
    """Random block metric close to the identity depending on ``axes``.

    The amplitude keeps each block diagonally dominant, hence positive
    definite everywhere.
    """
    rng = random.Random(seed)
    n = p + q
    axes = list(range(n)) if axes is None else list(axes)
    GF = _random_spd_block(rng, n, p, axes, amp, bw)
    GP = _random_spd_block(rng, n, q, axes, amp, bw)
    return CoordFoliatedTorus(p, q, GF, GP, eps, name=name or f"rand_torus_{seed}")


def product_model(p=2, q=2, amp=0.1, seed=0):
    """``GF`` depends on leaf coordinates only, ``GP`` on transverse ones."""
    rng = random.Random(seed)
    n = p + q
    GF = _random_spd_block(rng, n, p, list(range(p)), amp, 1)
    GP = _random_spd_block(rng, n, q, list(range(p, n)), amp, 1)
    return CoordFoliatedTorus(p, q, GF, GP, 1.0, name=f"product_{seed}")


# ---------------------------------------------------------------------------
# file format

def torus_to_dict(m):
    return {
        "kind": "torus",
        "name": m.name,
        "p": m.p,
        "q": m.q,
        "epsilon": m.eps,
        "GF": [[m.GF[i][j].to_records() for j in range(m.p)] for i in range(m.p)],
        "GP": [[m.GP[i][j].to_records() for j in range(m.q)] for i in range(m.q)],
        "phi": [list(x) for x in m.phi],
    }


def torus_from_dict(d):
    try:
        p, q = int(d["p"]), int(d["q"])
        n = p + q

        def block(key, k):
            rows = d[key]
            if len(rows) != k or any(len(r) != k for r in rows):
                raise TorusModelError(f"{key} must be a {k} x {k} array")
            return tuple(tuple(TrigPolyField.from_records(n, rows[i][j]) for j in range(k))
                         for i in range(k))

        return CoordFoliatedTorus(p, q, block("GF", p), block("GP", q),
                                  float(d.get("epsilon", 1.0)), d.get("name", "torus"),
                                  tuple(tuple(x) for x in d.get("phi", [])))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, TorusModelError):
            raise
        raise TorusModelError(f"malformed torus model: {exc}") from exc


def load_torus(path):
    with open(path) as fh:
        return torus_from_dict(json.load(fh))
