"""Chern-Weil forms of the leaf, transverse and tangent curvatures of a
coordinate-foliated torus, and the characteristic pairings over the torus.

A form is stored as a map from a bitmask of coordinate indices (bit ``m``
for ``dx^m``; the indices are taken in increasing order) to its component
field.  Components may be scalar fields or matrix fields (trailing
``(r, r)``) so that curvature matrices are forms with matrix coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .clifford import PhiBundleSpec
from .geometry import build_cache
from .trig import spectral_derivative


def _popcount(x):
    return bin(x).count("1")


def _wedge_sign(a, b):
    """Sign of moving the sorted indices of ``b`` past those of ``a``."""
    s = 0
    for j in range(b.bit_length()):
        if b >> j & 1:
            s += _popcount(a >> (j + 1))
    return -1 if s % 2 else 1


@dataclass
class FormField:
    n: int
    comps: dict = field(default_factory=dict)
    matrix: bool = False

    # construction -------------------------------------------------------------
    @classmethod
    def constant(cls, n, value, like=None):
        return cls(n, {0: np.asarray(value, dtype=float) if like is None else
                       np.full(like, value, dtype=float)})

    @classmethod
    def curvature(cls, R):
        """Matrix-valued 2-form from ``R[..., d, c, m, v]`` (endomorphism
        indices first, form indices last)."""
        n = R.shape[-1]
        comps = {}
        for m in range(n):
            for v in range(m + 1, n):
                comps[1 << m | 1 << v] = np.ascontiguousarray(R[..., m, v])
        return cls(n, comps, matrix=True)

    # algebra ------------------------------------------------------------------
    def degrees(self):
        return sorted({_popcount(k) for k in self.comps})

    def component(self, degree):
        return FormField(self.n, {k: v for k, v in self.comps.items()
                                  if _popcount(k) == degree}, self.matrix)

    def __add__(self, other):
        if isinstance(other, (int, float, Fraction)):
            other = FormField(self.n, {0: float(other) * (np.eye(self.rank) if self.matrix
                                                          else 1.0)}, self.matrix)
        out = dict(self.comps)
        for k, v in other.comps.items():
            out[k] = out[k] + v if k in out else v
        return FormField(self.n, out, self.matrix or other.matrix)

    __radd__ = __add__

    def scale(self, s):
        s = float(s)
        return FormField(self.n, {k: s * v for k, v in self.comps.items()}, self.matrix)

    def __sub__(self, other):
        return self + other.scale(-1)

    def wedge(self, other, max_degree=None):
        top = self.n if max_degree is None else max_degree
        out = {}
        for a, x in self.comps.items():
            for b, y in other.comps.items():
                if a & b or _popcount(a | b) > top:
                    continue
                if self.matrix and other.matrix:
                    term = x @ y
                elif self.matrix:
                    term = x * np.asarray(y)[..., None, None]
                elif other.matrix:
                    term = np.asarray(x)[..., None, None] * y
                else:
                    term = x * y
                if _wedge_sign(a, b) < 0:
                    term = -term
                k = a | b
                out[k] = out[k] + term if k in out else term
        return FormField(self.n, out, self.matrix or other.matrix)

    __mul__ = wedge

    @property
    def rank(self):
        for v in self.comps.values():
            return v.shape[-1]
        return 0

    def trace(self):
        if not self.matrix:
            raise ValueError("trace of a scalar form")
        return FormField(self.n, {k: np.trace(v, axis1=-2, axis2=-1)
                                  for k, v in self.comps.items()})

    def top(self):
        """Coefficient field of ``dx^1 ^ ... ^ dx^n``."""
        return self.comps.get((1 << self.n) - 1, 0.0)

    # calculus ----------------------------------------------------------------
    def d(self):
        """Exterior derivative by Fourier differentiation of the components
        (axes of length 1 are constant directions)."""
        out = {}
        for k, v in self.comps.items():
            arr = np.asarray(v)
            if arr.ndim < self.n:
                continue
            for m in range(self.n):
                if k >> m & 1 or arr.shape[m] == 1:
                    continue
                dv = spectral_derivative(arr, m)
                # dx^m ^ (component of dx^K): move dx^m into sorted position
                sgn = -1 if _popcount(k & ((1 << m) - 1)) % 2 else 1
                kk = k | 1 << m
                term = sgn * dv
                out[kk] = out[kk] + term if kk in out else term
        return FormField(self.n, out, self.matrix)

    def sup_norm(self):
        vals = [float(np.max(np.abs(v))) for v in self.comps.values()]
        return max(vals, default=0.0)

    def integrate(self):
        """``int_{T^n}`` of the top-degree part (unit torus, trapezoidal)."""
        return float(np.mean(self.top()))


# ---------------------------------------------------------------------------
# characteristic forms

A_HAT = {1: (Fraction(-1, 24),), 2: (Fraction(7, 5760), Fraction(-4, 5760))}
L_SERIES = {1: (Fraction(1, 3),), 2: (Fraction(-1, 45), Fraction(7, 45))}
# degree-8 coefficients multiply (p1^2, p2)


def _check_skew(Rform, tol=1e-9):
    for v in Rform.comps.values():
        err = float(np.max(np.abs(v + np.swapaxes(v, -1, -2)))) if np.size(v) else 0.0
        scale = max(1.0, float(np.max(np.abs(v))))
        if err > tol * scale:
            raise ValueError(f"curvature is not skew-adjoint (defect {err:.3g})")


def _normalised(Rform):
    return Rform.scale(1.0 / (2.0 * math.pi))


def _trace_even_powers(Rform):
    """``tr((R / 2 pi)^(2k))`` for ``4k <= n``."""
    A = _normalised(Rform)
    n = Rform.n
    out = {}
    power = A
    k = 0
    while 4 * (k + 1) <= n:
        power = power.wedge(A, n)
        k += 1
        out[k] = power.trace()
        power = power.wedge(A, n)
    return out


def pontryagin_forms(Rform):
    """``[p_1, p_2, ...]`` up to degree ``n`` from a skew curvature form.

    With ``A = R / 2 pi`` the power sums of the squared Chern roots are
    ``P_k = (-1)^k tr(A^(2k)) / 2``; Newton's identities give ``p_k``.
    """
    _check_skew(Rform)
    n = Rform.n
    tr = _trace_even_powers(Rform)
    P = {k: v.scale((-1) ** k / 2.0) for k, v in tr.items()}
    e = {0: FormField(n, {0: 1.0})}
    for k in range(1, len(P) + 1):
        acc = None
        for i in range(1, k + 1):
            term = e[k - i].wedge(P[i], n).scale((-1) ** (i - 1))
            acc = term if acc is None else acc + term
        e[k] = acc.scale(1.0 / k)
    return [e[k] for k in range(1, len(P) + 1)]


def _series(p, coeffs, n):
    one = FormField(n, {0: 1.0})
    out = one
    if len(p) >= 1 and 1 in coeffs:
        out = out + p[0].scale(coeffs[1][0])
    if 2 in coeffs and n >= 8:
        p1sq = p[0].wedge(p[0], n)
        out = out + p1sq.scale(coeffs[2][0])
        if len(p) >= 2:
            out = out + p[1].scale(coeffs[2][1])
    return out


def a_hat_form(RF):
    """``1 - p_1/24 + (7 p_1^2 - 4 p_2)/5760`` (through degree 8)."""
    if RF.n > 8:
        raise ValueError("series are tabulated through degree 8")
    return _series(pontryagin_forms(RF), A_HAT, RF.n)


def l_form(RP):
    """``1 + p_1/3 + (7 p_2 - p_1^2)/45`` (through degree 8)."""
    if RP.n > 8:
        raise ValueError("series are tabulated through degree 8")
    return _series(pontryagin_forms(RP), L_SERIES, RP.n)


def ch_form(Rphi):
    """Chern character of the complexification: ``tr exp(i R / 2 pi)``,
    whose odd-degree parts vanish for real skew ``R``."""
    _check_skew(Rphi)
    n = Rphi.n
    A = _normalised(Rphi)
    r = Rphi.rank
    out = FormField(n, {0: float(r)})
    power = FormField(n, {0: np.eye(r)}, matrix=True)
    for j in range(1, n // 2 + 1):
        power = power.wedge(A, n)
        if j % 2 == 0:
            out = out + power.trace().scale((-1) ** (j // 2) / math.factorial(j))
    return out


def _pfaffian(entries, idx, n):
    if not idx:
        return FormField(n, {0: 1.0})
    i = idx[0]
    out = None
    for pos, j in enumerate(idx[1:]):
        rest = [x for x in idx[1:] if x != j]
        term = entries(i, j).wedge(_pfaffian(entries, rest, n), n)
        if pos % 2:
            term = term.scale(-1)
        out = term if out is None else out + term
    return out


def euler_form(RP):
    """``Pf(R / 2 pi)``; requires even rank."""
    _check_skew(RP)
    r = RP.rank
    if r % 2:
        raise ValueError(f"the Pfaffian needs even rank, got {r}")
    A = _normalised(RP)

    def entry(i, j):
        return FormField(A.n, {k: v[..., i, j] for k, v in A.comps.items()})

    return _pfaffian(entry, list(range(r)), A.n)


# ---------------------------------------------------------------------------
# curvature sources on a torus model

def curvature_forms(cache):
    """Skew curvature forms of ``nabla^F``, ``nabla^{F-perp}`` and the
    Levi-Civita connection, in orthonormal frames."""
    F, P = cache.F, cache.P
    RF = FormField.curvature(cache.fibre_frame(cache.riemann_leaf(), F))
    RP = FormField.curvature(cache.fibre_frame(cache.riemann_perp(), P))
    RT = FormField.curvature(cache.fibre_frame(cache.riemann()))
    return RF, RP, RT


def phi_curvature(RP, phi):
    if isinstance(phi, PhiBundleSpec):
        spec = phi
    else:
        q = RP.rank
        spec = PhiBundleSpec(q, tuple(tuple(t) for t in phi) if phi else (("ext", 0, 1),))
    return FormField(RP.n, {k: spec.lift(v) for k, v in RP.comps.items()}, matrix=True)


def _monomials(q_deg_max):
    """Pontryagin monomials ``p_1^a p_2^b`` of degree ``4a + 8b <= n``."""
    out = []
    for a in range(q_deg_max // 4 + 1):
        for b in range(q_deg_max // 8 + 1):
            if 0 < 4 * a + 8 * b <= q_deg_max:
                out.append((a, b))
    return out


@dataclass
class CharClassReport:
    model: str
    N: int
    phi: str
    values: dict  # pairing name -> value
    closure: dict  # form name -> sup |d form|

    def rows(self):
        out = [{"model": self.model, "N": self.N, "phi": self.phi, "quantity": k,
                "value": v} for k, v in self.values.items()]
        out += [{"model": self.model, "N": self.N, "phi": self.phi, "quantity": f"d({k})",
                 "value": v} for k, v in self.closure.items()]
        return out


def characteristic_pairings(m, N, phi=None):
    """All pairings of the vanishing theorems for one model at resolution N."""
    cache = build_cache(m.with_eps(1.0), N)
    n = m.n
    RF, RP, RT = curvature_forms(cache)
    phi = phi if phi is not None else (m.phi or None)
    Rphi = phi_curvature(RP, phi)
    ahat = a_hat_form(RF)
    forms = {"A(F)": ahat, "L(Fperp)": l_form(RP), "ch(phi)": ch_form(Rphi),
             "A(TM)": a_hat_form(RT)}
    pP = pontryagin_forms(RP)
    for i, p in enumerate(pP, 1):
        forms[f"p{i}(Fperp)"] = p
    values = {}
    integrand = ahat.wedge(forms["L(Fperp)"], n).wedge(forms["ch(phi)"], n)
    forms["A(F)L(Fperp)ch(phi)"] = integrand
    values["<A(F)L(Fperp)ch(phi),[M]>"] = integrand.integrate()
    for a, b in _monomials(n):
        mono = FormField(n, {0: 1.0})
        for _ in range(a):
            mono = mono.wedge(pP[0], n)
        for _ in range(b):
            mono = mono.wedge(pP[1], n)
        tag = "p1^%d" % a if a else ""
        tag += ("*" if a and b else "") + ("p2^%d" % b if b else "")
        values[f"<A(F){tag}(Fperp),[M]>"] = ahat.wedge(mono, n).integrate()
    if m.q % 2 == 0:
        e = euler_form(RP)
        forms["e(Fperp)"] = e
        values["<A(F)e(Fperp),[M]>"] = ahat.wedge(e, n).integrate()
    values["<A(TM),[M]>"] = forms["A(TM)"].integrate()
    closure = {k: f.d().sup_norm() for k, f in forms.items()}
    return CharClassReport(m.name, N, _phi_name(phi), values, closure)


def _phi_name(phi):
    if not phi:
        return "trivial"
    terms = phi.terms if isinstance(phi, PhiBundleSpec) else phi
    return "+".join(f"{mult}{kind}{k}" for kind, k, mult in terms)


def vanishing_pairings(models, N, phi=None):
    return [characteristic_pairings(m, N, phi) for m in models]
