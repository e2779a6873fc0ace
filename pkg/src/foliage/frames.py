"""Left-invariant foliated frame models with exact geometry in ``t = sqrt(eps)``.

A model is a real Lie algebra with basis ``e_1..e_n`` declared orthonormal,
where ``e_1..e_p`` span the foliation F and ``e_{p+1}..e_n`` span its
orthogonal complement.  Indices are 0-based in code and 1-based in reports
and model files.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .exact import ONE, T, ZERO, ExactScalar, as_exact, evaluate


class ModelError(ValueError):
    """A model violates one of its structural invariants."""

    def __init__(self, message, indices=None):
        super().__init__(message)
        self.indices = indices


@dataclass(frozen=True)
class LieFrameModel:
    p: int
    q: int
    c: tuple  # c[i][j][k] as Fractions, [e_i, e_j] = sum_k c[i][j][k] e_k
    name: str = "model"
    labels: tuple = ()
    orient_F: int = 1
    orient_P: int = 1
    split: tuple | None = None  # (F1perp indices, F2perp indices), 0-based

    @property
    def n(self):
        return self.p + self.q

    @property
    def F(self):
        return range(self.p)

    @property
    def P(self):
        return range(self.p, self.n)

    def nonzero_brackets(self):
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(n):
                    if self.c[i][j][k]:
                        yield i, j, k, self.c[i][j][k]

    # construction ------------------------------------------------------------
    @classmethod
    def from_brackets(cls, n, p, brackets, *, leaf=None, name="model",
                      orient_F=1, orient_P=1, split=None, validate=True):
        """Build from 1-based ``(i, j, k, value)`` records meaning
        ``[e_i, e_j] += value e_k``.

        ``leaf`` lists the original labels spanning F; the basis is relabelled
        so those come first.  ``split`` is a pair of label lists partitioning
        the complement.
        """
        if not 0 <= p <= n:
            raise ModelError(f"p = {p} out of range for n = {n}")
        raw = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        seen = {}
        for rec in brackets:
            i, j, k, v = rec
            v = Fraction(v)
            if not all(1 <= x <= n for x in (i, j, k)):
                raise ModelError(f"bracket index out of range: {(i, j, k)}", (i, j, k))
            if i == j:
                if v:
                    raise ModelError(f"[e_{i}, e_{i}] must vanish", (i, j, k))
                continue
            key = (min(i, j), max(i, j), k)
            signed = v if i < j else -v
            if key in seen and seen[key] != signed:
                raise ModelError(f"inconsistent antisymmetry at {(i, j, k)}", (i, j, k))
            seen[key] = signed
            a, b = key[0] - 1, key[1] - 1
            raw[a][b][k - 1] = signed
            raw[b][a][k - 1] = -signed
        if leaf is None:
            order = list(range(1, n + 1))
        else:
            leaf = list(leaf)
            if len(leaf) != p or len(set(leaf)) != p:
                raise ModelError(f"leaf {leaf} must list {p} distinct labels")
            order = leaf + [x for x in range(1, n + 1) if x not in leaf]
        pos = {lab: idx for idx, lab in enumerate(order)}
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        for a in range(n):
            for b in range(n):
                for k in range(n):
                    v = raw[order[a] - 1][order[b] - 1][order[k] - 1]
                    if v:
                        c[a][b][k] = v
        sp = None
        if split is not None:
            s1, s2 = (tuple(sorted(pos[x] for x in part)) for part in split)
            sp = (s1, s2)
        model = cls(p, n - p, tuple(tuple(tuple(r) for r in m) for m in c),
                    name=name, labels=tuple(order), orient_F=orient_F,
                    orient_P=orient_P, split=sp)
        if validate:
            model.validate()
        return model

    def with_split(self, first, second):
        """Declare ``F_perp = F1 + F2`` using 1-based *frame* indices."""
        return LieFrameModel(self.p, self.q, self.c, self.name, self.labels,
                             self.orient_F, self.orient_P,
                             (tuple(x - 1 for x in first), tuple(x - 1 for x in second)))

    # invariants --------------------------------------------------------------
    def validate(self):
        n, c = self.n, self.c
        for i, j, k in itertools.product(range(n), repeat=3):
            if c[i][j][k] != -c[j][i][k]:
                raise ModelError(f"antisymmetry fails at {(i + 1, j + 1, k + 1)}",
                                 (i + 1, j + 1, k + 1))
        viol = jacobi_violation(c)
        if viol is not None:
            i, j, k = viol
            raise ModelError(f"Jacobi identity fails for (e_{i + 1}, e_{j + 1}, e_{k + 1})",
                             (i + 1, j + 1, k + 1))
        for i in self.F:
            for j in self.F:
                for k in self.P:
                    if c[i][j][k]:
                        raise ModelError(
                            f"F is not closed under the bracket: c[{i + 1}][{j + 1}][{k + 1}] != 0",
                            (i + 1, j + 1, k + 1))
        if self.split is not None:
            s1, s2 = self.split
            if sorted(s1 + s2) != list(self.P) or not s1 or not s2:
                raise ModelError("split must partition the complement frame indices")
        return self


def jacobi_violation(c):
    n = len(c)
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for m in range(n):
                    s = Fraction(0)
                    for l in range(n):
                        s += (c[j][k][l] * c[i][l][m] + c[k][i][l] * c[j][l][m]
                              + c[i][j][l] * c[k][l][m])
                    if s:
                        return i, j, k
    return None


# --------------------------------------------------------------------------
# model files

def load_model(path):
    """Read a JSON model file; bracket and split indices are 1-based."""
    data = json.loads(Path(path).read_text())
    return model_from_dict(data)


def model_from_dict(data):
    try:
        n, p = int(data["n"]), int(data["p"])
        q = int(data.get("q", n - p))
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"model file needs integer n and p: {exc}") from None
    if p + q != n:
        raise ModelError(f"n = {n} differs from p + q = {p + q}")
    recs = [(int(r[0]), int(r[1]), int(r[2]), Fraction(str(r[3])))
            for r in data.get("brackets", [])]
    split = data.get("split")
    orient = data.get("orientation", {})
    return LieFrameModel.from_brackets(
        n, p, recs, leaf=data.get("leaf"), name=data.get("name", "model"),
        orient_F=int(orient.get("F", 1)), orient_P=int(orient.get("Fperp", 1)),
        split=tuple(split) if split else None)


def model_to_dict(m):
    out = {
        "name": m.name, "n": m.n, "p": m.p, "q": m.q,
        "brackets": [[i + 1, j + 1, k + 1, str(v)] for i, j, k, v in m.nonzero_brackets()],
        "orientation": {"F": m.orient_F, "Fperp": m.orient_P},
    }
    if m.split is not None:
        out["split"] = [[x + 1 for x in m.split[0]], [x + 1 for x in m.split[1]]]
    return out


# --------------------------------------------------------------------------
# exact connection and curvature

def scaled_structure(m, scales):
    """Structure constants of the rescaled frame ``E_a = scales[a] * e_a``."""
    n = m.n
    C = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
    for i, j, k, v in m.nonzero_brackets():
        val = scales[i] * scales[j] / scales[k] * v
        C[i][j][k] = val
        C[j][i][k] = -val
    return C


def eps_scales(m):
    """Scales ``(1,..,1, t,..,t)`` making the frame orthonormal for ``g_eps``."""
    return [ONE] * m.p + [T] * m.q


def levi_civita(C):
    """``G[a][b][k] = <nabla_{E_a} E_b, E_k>`` for an orthonormal frame with
    constant structure constants ``C``."""
    n = len(C)
    G = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
    half = Fraction(1, 2)
    for a in range(n):
        for b in range(n):
            for k in range(n):
                s = C[a][b][k] - C[b][k][a] + C[k][a][b]
                if s:
                    G[a][b][k] = s * half
    return G


@dataclass
class ConnectionTable:
    """Levi-Civita coefficients in an orthonormal constant frame."""

    gamma: list
    C: list
    p: int
    q: int
    scales: list = field(default_factory=list)

    @property
    def n(self):
        return self.p + self.q

    def skew_violations(self):
        n = self.n
        return [(a, b, k) for a in range(n) for b in range(n) for k in range(n)
                if self.gamma[a][b][k] != -self.gamma[a][k][b]]

    def torsion_violations(self):
        n, G, C = self.n, self.gamma, self.C
        return [(a, b, k) for a in range(n) for b in range(n) for k in range(n)
                if G[a][b][k] - G[b][a][k] != C[a][b][k]]

    def at(self, t0):
        n = self.n
        return [[[evaluate(self.gamma[a][b][k], t0) for k in range(n)]
                 for b in range(n)] for a in range(n)]


def koszul_connection(m):
    """Connection table of ``g_eps`` in the frame ``{f_i, t h_s}``."""
    scales = eps_scales(m)
    C = scaled_structure(m, scales)
    return ConnectionTable(levi_civita(C), C, m.p, m.q, scales)


def unit_connection(m):
    """Connection table at ``eps = 1`` (constant entries)."""
    scales = [ONE] * m.n
    C = scaled_structure(m, scales)
    return ConnectionTable(levi_civita(C), C, m.p, m.q, scales)


def frame_christoffel(table):
    """Coefficients ``A[a][b][k]`` of ``nabla_{e_a} e_b = sum_k A e_k`` in the
    unscaled frame (so ``g``-inner products read off directly)."""
    n, s, G = table.n, table.scales, table.gamma
    A = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            den = s[a] * s[b]
            for k in range(n):
                if G[a][b][k]:
                    A[a][b][k] = G[a][b][k] * s[k] / den
    return A


def riemann(table):
    """``R[a][b][c][d] = <R(E_a, E_b) E_c, E_d>`` with
    ``R(A, B) = [nabla_A, nabla_B] - nabla_[A, B]``."""
    n, G, C = table.n, table.gamma, table.C
    nz = [[[e for e in range(n) if G[a][b][e]] for b in range(n)] for a in range(n)]
    cnz = [[[e for e in range(n) if C[a][b][e]] for b in range(n)] for a in range(n)]
    R = [[[[ZERO] * n for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(n):
                for d in range(n):
                    s = ZERO
                    for e in nz[b][c]:
                        if G[a][e][d]:
                            s = s + G[b][c][e] * G[a][e][d]
                    for e in nz[a][c]:
                        if G[b][e][d]:
                            s = s - G[a][c][e] * G[b][e][d]
                    for e in cnz[a][b]:
                        if G[e][c][d]:
                            s = s - C[a][b][e] * G[e][c][d]
                    if s:
                        R[a][b][c][d] = s
                        R[b][a][c][d] = -s
    return R


def scalar_curvature_full(R):
    """``sum_{a,b} <R(E_a, E_b) E_b, E_a>`` (positive on round spheres)."""
    n = len(R)
    s = ZERO
    for a in range(n):
        for b in range(n):
            if R[a][b][b][a]:
                s = s + R[a][b][b][a]
    return s


@dataclass
class CurvatureBlocks:
    """Block sums written with ``g``-inner products in the unscaled frame:
    ``ff = sum <R(f_i,f_j) f_i, f_j>``, ``hh = eps * sum <R(h_s,h_t) h_s, h_t>``,
    ``fh = sum <R(f_i,h_s) f_i, h_s>``."""

    ff: ExactScalar
    hh: ExactScalar
    fh: ExactScalar

    @property
    def scalar(self):
        # each mixed pair occurs twice in the full contraction
        return -(self.ff + self.hh + 2 * self.fh)


def curvature_blocks(table, R):
    p, n, s = table.p, table.n, table.scales
    ff = ZERO
    for i in range(p):
        for j in range(p):
            ff = ff + R[i][j][i][j]
    hh = ZERO
    fh = ZERO
    for a in range(p, n):
        for b in range(p, n):
            # <R(sh, sh) sh, sh>_eps = s^4 / s^2 <R(h,h)h,h>_g = eps <..>_g
            hh = hh + R[a][b][a][b]
    for i in range(p):
        for a in range(p, n):
            # <R(f, s h) f, s h>_eps = <R(f,h) f, h>_g
            fh = fh + R[i][a][i][a]
    return CurvatureBlocks(ff, hh, fh)


def curvature(m):
    """Curvature tensor of ``g_eps`` in the frame ``{f_i, t h_s}``."""
    return riemann(koszul_connection(m))


def scalar_curvature(m):
    """Exact ``k_{TM,eps}`` assembled from the F, F-perp and mixed blocks."""
    table = koszul_connection(m)
    return curvature_blocks(table, riemann(table)).scalar
