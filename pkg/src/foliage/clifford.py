"""Clifford modules of a foliated metric: spinors of F, the exterior algebra
of F-perp with its two Clifford actions, their graded tensor product and
bundles ``phi(F-perp)`` built from exterior and symmetric powers.

All representation matrices have entries in ``{0, +-1, +-i}``; products of a
few of them are Gaussian integers of small size and are exact in complex128,
so the algebra relations are checked with exact equality.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


def _kron(*ms):
    out = np.eye(1, dtype=complex)
    for m in ms:
        out = np.kron(out, m)
    return out


def _chirality(gens):
    """``(1/i)^{k(k+1)/2} c_1 ... c_k`` for ``k = len(gens)``."""
    k = len(gens)
    out = np.eye(gens[0].shape[0], dtype=complex)
    for g in gens:
        out = out @ g
    return (-1j) ** ((k * (k + 1) // 2) % 4) * out


def _require_even(k, name, cap):
    if k % 2 or k <= 0:
        raise ValueError(f"{name} must be a positive even integer, got {k}")
    if k > cap:
        raise ValueError(f"{name} = {k} exceeds the supported maximum {cap}")


# ---------------------------------------------------------------------------
# spinors of F

@dataclass(frozen=True)
class SpinRep:
    p: int
    gamma: np.ndarray  # (p, d, d): c(f_i), skew-adjoint, square -1
    grading: np.ndarray

    @property
    def dim(self):
        return self.gamma.shape[-1]


def build_spin_rep(p):
    """Complex spinor module of ``Cl(R^p)`` built from Pauli strings."""
    _require_even(p, "p", 8)
    k = p // 2
    gens = []
    for j in range(k):
        pre = [_Z] * j
        post = [_I2] * (k - j - 1)
        gens.append(1j * _kron(*pre, _X, *post))
        gens.append(1j * _kron(*pre, _Y, *post))
    gamma = np.array(gens)
    return SpinRep(p, gamma, _chirality(gens))


# ---------------------------------------------------------------------------
# exterior algebra of F-perp

def _ext_int(q):
    """Exterior and interior multiplication by ``h_s`` on ``Lambda(R^q)``
    in the basis of increasing multi-indices labelled by bitmasks."""
    d = 1 << q
    ext = np.zeros((q, d, d))
    inn = np.zeros((q, d, d))
    for s in range(q):
        bit = 1 << s
        for I in range(d):
            sign = -1.0 if bin(I & (bit - 1)).count("1") % 2 else 1.0
            if I & bit:
                inn[s, I ^ bit, I] = sign
            else:
                ext[s, I | bit, I] = sign
    return ext, inn


@dataclass(frozen=True)
class ExtRep:
    q: int
    ext: np.ndarray
    inn: np.ndarray
    c: np.ndarray  # c(h_s) = ext - int
    chat: np.ndarray  # c^(h_s) = ext + int
    tau: np.ndarray

    @property
    def dim(self):
        return 1 << self.q

    def eigenspaces(self):
        """Orthonormal bases of ``Lambda_+`` and ``Lambda_-``."""
        w, V = np.linalg.eigh(self.tau)
        return V[:, w > 0], V[:, w < 0]

    def degree_parity(self):
        return np.array([bin(I).count("1") % 2 for I in range(self.dim)])


def build_ext_rep(q):
    _require_even(q, "q", 6)
    ext, inn = _ext_int(q)
    c = (ext - inn).astype(complex)
    chat = (ext + inn).astype(complex)
    return ExtRep(q, ext, inn, c, chat, _chirality(list(c)))


# ---------------------------------------------------------------------------
# phi(F-perp)

def _isometric_embedding(q, k, kind):
    """Columns: orthonormal basis of ``Lambda^k`` or ``Sym^k`` inside the
    k-th tensor power of ``R^q``."""
    if k == 0:
        return np.ones((1, 1))
    cols = []
    combos = (itertools.combinations(range(q), k) if kind == "ext"
              else itertools.combinations_with_replacement(range(q), k))
    for combo in combos:
        v = np.zeros(q ** k)
        for perm in itertools.permutations(range(k)):
            idx = [combo[i] for i in perm]
            flat = 0
            for i in idx:
                flat = flat * q + i
            if kind == "ext":
                inv = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
                v[flat] += -1.0 if inv % 2 else 1.0
            else:
                v[flat] += 1.0
        cols.append(v / np.linalg.norm(v))
    return np.array(cols).T


def _tensor_derivation(A, k):
    """``sum_j 1 x .. x A x .. x 1`` on the k-th tensor power."""
    q = A.shape[0]
    out = np.zeros((q ** k, q ** k), dtype=A.dtype)
    for j in range(k):
        out = out + _kron(np.eye(q ** j), A, np.eye(q ** (k - j - 1))).real.astype(A.dtype)
    return out


@dataclass(frozen=True)
class PhiBundleSpec:
    """Nonnegative integer combination of ``Lambda^k`` and ``Sym^k`` of
    F-perp, e.g. ``(("ext", 1, 2),)`` for ``F-perp + F-perp``."""

    q: int
    terms: tuple = (("ext", 0, 1),)

    def __post_init__(self):
        clean = []
        for kind, k, mult in self.terms:
            if kind not in ("ext", "sym"):
                raise ValueError(f"unknown phi kind {kind!r}; use 'ext' or 'sym'")
            if int(k) < 0 or int(mult) < 0:
                raise ValueError("phi degrees and multiplicities must be nonnegative")
            if kind == "ext" and int(k) > self.q:
                raise ValueError(f"Lambda^{k} of a rank-{self.q} bundle is zero")
            clean.append((kind, int(k), int(mult)))
        object.__setattr__(self, "terms", tuple(clean))
        if self.rank == 0:
            raise ValueError("phi must have positive rank")

    @staticmethod
    def term_rank(q, kind, k):
        return math.comb(q, k) if kind == "ext" else math.comb(q + k - 1, k)

    @property
    def rank(self):
        return sum(m * self.term_rank(self.q, kind, k) for kind, k, m in self.terms)

    @cached_property
    def generators(self):
        """``L[a, b]`` = lift of the elementary matrix ``E_ab`` (real)."""
        q, r = self.q, self.rank
        L = np.zeros((q, q, r, r))
        for a in range(q):
            for b in range(q):
                E = np.zeros((q, q))
                E[a, b] = 1.0
                L[a, b] = self._lift_single(E)
        return L

    def _lift_single(self, A):
        blocks = []
        for kind, k, mult in self.terms:
            V = _isometric_embedding(self.q, k, kind)
            if k == 0:
                blk = np.zeros((1, 1))
            else:
                blk = V.T @ _tensor_derivation(A, k) @ V
            blocks.extend([blk] * mult)
        r = self.rank
        out = np.zeros((r, r), dtype=A.dtype)
        o = 0
        for b in blocks:
            s = b.shape[0]
            out[o:o + s, o:o + s] = b
            o += s
        return out

    def lift(self, A):
        """Derivation lift of endomorphisms ``A[..., a, b]`` of F-perp."""
        return np.einsum("...ab,abij->...ij", A, self.generators)

    @property
    def is_trivial(self):
        return all(k == 0 for _, k, _ in self.terms)


def curvature_lift(R, phi):
    """``R^{phi}`` from ``R^{F-perp}`` given with fibre indices last."""
    return phi.lift(R)


# ---------------------------------------------------------------------------
# graded tensor product

@dataclass(frozen=True)
class GradedFiber:
    p: int
    q: int
    phi: PhiBundleSpec
    spin: SpinRep
    ext: ExtRep
    cF: np.ndarray  # (p, d, d)
    cP: np.ndarray  # (q, d, d)
    chatP: np.ndarray  # (q, d, d)
    grading: np.ndarray

    @property
    def dim(self):
        return self.grading.shape[0]

    def c_frame(self):
        """Clifford action of the full frame ``(f_1..f_p, h_1..h_q)``."""
        return np.concatenate([self.cF, self.cP])

    def block_projectors(self):
        """Projectors onto the four blocks ``S_a x Lambda_b x phi``."""
        ds, de, r = self.spin.dim, self.ext.dim, self.phi.rank
        Ps = [(np.eye(ds) + sg * self.spin.grading) / 2 for sg in (1, -1)]
        Pe = [(np.eye(de) + sg * self.ext.tau) / 2 for sg in (1, -1)]
        out = {}
        for i, a in enumerate("+-"):
            for j, b in enumerate("+-"):
                out[a + b] = _kron(Ps[i], Pe[j], np.eye(r))
        return out

    # connection lifts (constant-coefficient generators) ----------------------
    @cached_property
    def spin_generators(self):
        """``G[a, b] = c(f_a) c(f_b) / 4`` so that the spinor connection is
        ``sum_ab <nabla f_a, f_b> G[a, b]``."""
        return 0.25 * self.cF[:, None] @ self.cF[None, :]

    @cached_property
    def ext_generators(self):
        """``G[a, b] = h_a^* ^ i_{h_b}`` lifted, so the induced connection on
        the exterior algebra is ``sum_ab <nabla h_b, h_a> G[a, b]``."""
        ds, r = self.spin.dim, self.phi.rank
        G = np.einsum("aij,bjk->abik", self.ext.ext, self.ext.inn)
        return np.array([[_kron(np.eye(ds), G[a, b], np.eye(r)) for b in range(self.q)]
                         for a in range(self.q)])

    @cached_property
    def phi_generators(self):
        ds, de = self.spin.dim, self.ext.dim
        L = self.phi.generators
        return np.array([[_kron(np.eye(ds * de), L[a, b]) for b in range(self.q)]
                         for a in range(self.q)])

    @cached_property
    def mixed_generators(self):
        """``G[j, s] = c(f_j) c(h_s) / 2`` (the S-correction of the
        sub-Dirac connection)."""
        return 0.5 * self.cF[:, None] @ self.cP[None, :]

    def lift_endomorphism(self, Aperp):
        """Lift of a skew endomorphism of F-perp to ``Lambda x phi``."""
        return (np.einsum("...ab,abij->...ij", Aperp, self.ext_generators)
                + np.einsum("...ab,abij->...ij", Aperp, self.phi_generators))


def graded_tensor(spin, ext, phi=None):
    phi = phi or PhiBundleSpec(ext.q)
    if phi.q != ext.q:
        raise ValueError("phi is defined for a different rank of F-perp")
    r = phi.rank
    de = ext.dim
    Gs = spin.grading
    cF = np.array([_kron(g, np.eye(de), np.eye(r)) for g in spin.gamma])
    cP = np.array([_kron(Gs, c, np.eye(r)) for c in ext.c])
    ch = np.array([_kron(np.eye(spin.dim), c, np.eye(r)) for c in ext.chat])
    grading = _kron(Gs, ext.tau, np.eye(r))
    return GradedFiber(spin.p, ext.q, phi, spin, ext, cF, cP, ch, grading)


def build_fiber(p, q, phi=None):
    if phi is not None and not isinstance(phi, PhiBundleSpec):
        phi = PhiBundleSpec(q, tuple(tuple(t) for t in phi))
    return graded_tensor(build_spin_rep(p), build_ext_rep(q), phi)


# ---------------------------------------------------------------------------
# pointwise lifts on a geometry cache

def lift_connection(cache, fiber):
    """Connection matrices of ``nabla^{(S(F) x Lambda) x phi}`` along each
    coordinate direction: ``A[..., mu, :, :]`` (complex, skew-adjoint)."""
    if (cache.p, cache.q) != (fiber.p, fiber.q):
        raise ValueError(f"cache has (p, q) = ({cache.p}, {cache.q}) but the fibre "
                         f"was built for ({fiber.p}, {fiber.q})")
    p = cache.p
    conn = cache.conn  # (..., mu, b, a) = <nabla_mu E_a, E_b>
    CF = conn[..., :p, :p]
    CP = conn[..., p:, p:]
    # spinor lift: sum_ab <nabla f_a, f_b> c_a c_b / 4
    A = np.einsum("...mba,abij->...mij", CF, fiber.spin_generators)
    # exterior and phi: sum_ab A_ab G[a, b] with A = conn block (row = b index)
    A = A + np.einsum("...mab,abij->...mij", CP, fiber.ext_generators)
    A = A + np.einsum("...mab,abij->...mij", CP, fiber.phi_generators)
    return A


def s_correction(cache, fiber):
    """``(1/2) sum_{j,s} <S(d_mu) f_j, h_s> c(f_j) c(h_s)`` per direction."""
    p = cache.p
    S = cache.conn[..., p:, :p]  # (..., mu, s, j) = <nabla_mu f_j, h_s>
    return np.einsum("...msj,jsik->...mik", S, fiber.mixed_generators)


# ---------------------------------------------------------------------------
# relation suite

def _anti(A, B):
    return A @ B + B @ A


def _comm(A, B):
    return A @ B - B @ A


def clifford_relations_report(p, q, phi=None):
    """Exact check of the Clifford relations, the gradings and the block
    dimensions of the graded tensor product for one ``(p, q, phi)``."""
    from .report import Report

    fb = build_fiber(p, q, phi)
    sp, ex = fb.spin, fb.ext
    rep = Report()
    name = f"p{p}_q{q}"

    def row(check, eq, bad, detail=""):
        idx = bad[0] if bad else ()
        rep.add("clifford", check, eq, not bad, name, indices=idx,
                detail=detail or f"{len(bad)} violations")

    Is, Ie, Id = np.eye(sp.dim), np.eye(ex.dim), np.eye(fb.dim)
    pairs = lambda k: itertools.product(range(k), repeat=2)
    row("spin_relations", "2.5", [(i + 1, j + 1) for i, j in pairs(p)
                                  if not np.array_equal(_anti(sp.gamma[i], sp.gamma[j]),
                                                        -2 * (i == j) * Is)])
    row("spin_skew_adjoint", "2.3", [(i + 1,) for i in range(p)
                                     if not np.array_equal(sp.gamma[i].conj().T, -sp.gamma[i])])
    row("spin_grading", "2.3",
        [] if np.array_equal(sp.grading @ sp.grading, Is)
        and all(np.array_equal(_anti(sp.grading, g), 0 * Is) for g in sp.gamma)
        and int(round(np.trace(sp.grading).real)) == 0 else [(0,)])
    row("c_relations", "2.5", [(s + 1, t + 1) for s, t in pairs(q)
                               if not np.array_equal(_anti(ex.c[s], ex.c[t]), -2 * (s == t) * Ie)])
    row("chat_relations", "2.5", [(s + 1, t + 1) for s, t in pairs(q)
                                  if not np.array_equal(_anti(ex.chat[s], ex.chat[t]),
                                                        2 * (s == t) * Ie)])
    row("c_chat_anticommute", "2.5", [(s + 1, t + 1) for s, t in pairs(q)
                                      if not np.array_equal(_anti(ex.c[s], ex.chat[t]), 0 * Ie)])
    row("tau_squared_identity", "2.7",
        [] if np.array_equal(ex.tau @ ex.tau, Ie) else [(0,)])
    row("c_anticommutes_with_tau", "2.8",
        [(s + 1,) for s in range(q) if not np.array_equal(_anti(ex.c[s], ex.tau), 0 * Ie)])
    row("chat_commutes_with_tau", "2.8",
        [(s + 1,) for s in range(q) if not np.array_equal(_comm(ex.chat[s], ex.tau), 0 * Ie)])
    odd = list(fb.c_frame())
    row("lifted_c_relations", "2.11",
        [(a + 1, b + 1) for a, b in pairs(p + q)
         if not np.array_equal(_anti(odd[a], odd[b]), -2 * (a == b) * Id)])
    row("grading_anticommutes_with_c", "2.11",
        [(a + 1,) for a in range(p + q) if not np.array_equal(_anti(odd[a], fb.grading), 0 * Id)])
    row("grading_commutes_with_chat", "2.11",
        [(s + 1,) for s in range(q)
         if not np.array_equal(_comm(fb.chatP[s], fb.grading), 0 * Id)])
    r = fb.phi.rank
    half_s, half_e = sp.dim // 2, ex.dim // 2
    blocks = fb.block_projectors()
    dims = {k: int(round(np.trace(P).real)) for k, P in blocks.items()}
    expect = {k: half_s * half_e * r for k in blocks}
    even = int(round(np.trace((Id + fb.grading) / 2).real))
    ok = dims == expect and even == dims["++"] + dims["--"] == fb.dim // 2
    rep.add("clifford", "block_dimensions", "2.11", ok, name,
            lhs=" ".join(f"{k}:{v}" for k, v in dims.items()), rhs=str(expect["++"]),
            detail=f"even part {even} of {fb.dim}")
    return rep
