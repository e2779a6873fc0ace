"""Pointwise Riemannian geometry of a coordinate-foliated torus on a grid.

Every field is stored on the *active* sub-grid: axes on which no metric entry
depends have length 1 and broadcast against full-grid sections.  Arrays carry
the grid axes first and tensor indices last.

Conventions
-----------
``Gam[..., l, m, v]`` is the Christoffel symbol ``Gamma^l_{mv}`` of the
coordinate frame; ``R[..., r, s, m, v]`` is ``(R(d_m, d_v) d_s)^r`` with
``R(X, Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``.  ``E[..., mu, a]`` is the
``mu``-th coordinate component of the orthonormal frame vector ``E_a``
(``f_i`` for ``a < p``, ``sqrt(eps) h_s`` after), built from symmetric
square roots of the metric blocks.  ``conn[..., mu, b, a]`` is
``<nabla_{d_mu} E_a, E_b>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .trig import min_resolution, spectral_derivative


class AliasingError(ValueError):
    pass


class MetricNotPositiveError(ValueError):
    pass


def _sym_sqrt_and_derivative(G, dG):
    """Symmetric square root ``M`` of SPD ``G`` and ``dM`` for each
    derivative ``dG[..., k, :, :]`` (Sylvester equation ``M dM + dM M = dG``)."""
    lam, Q = np.linalg.eigh(G)
    if np.any(lam <= 0):
        raise MetricNotPositiveError("metric block is not positive definite on the grid")
    s = np.sqrt(lam)
    M = (Q * s[..., None, :]) @ np.swapaxes(Q, -1, -2)
    Minv = (Q / s[..., None, :]) @ np.swapaxes(Q, -1, -2)
    Qe = Q[..., None, :, :]
    Qt = np.swapaxes(Qe, -1, -2)
    denom = s[..., None, :, None] + s[..., None, None, :]
    dM = Qe @ ((Qt @ dG @ Qe) / denom) @ Qt
    return M, Minv, dM


def _blockdiag(A, B):
    p, q = A.shape[-1], B.shape[-1]
    shape = np.broadcast_shapes(A.shape[:-2], B.shape[:-2])
    out = np.zeros(shape + (p + q, p + q), dtype=np.result_type(A, B))
    out[..., :p, :p] = A
    out[..., p:, p:] = B
    return out


def curvature_of(Gam, dGam, sl=slice(None)):
    """Curvature ``R[..., r, s, m, v]`` of the connection whose coefficients
    are ``Gam`` with fibre indices restricted to the block ``sl``."""
    A = np.moveaxis(Gam[..., sl, :, sl], -2, -3)  # (..., m, r, s)
    dA = np.moveaxis(dGam[..., :, sl, :, sl], -2, -3)  # (..., k, m, r, s)
    R = dA - np.swapaxes(dA, -3, -4)
    AA = A[..., :, None, :, :] @ A[..., None, :, :, :]
    R = R + AA - np.swapaxes(AA, -3, -4)
    return np.moveaxis(R, (-4, -3), (-2, -1))


@dataclass
class GridGeometryCache:
    model: object
    N: int
    shape: tuple  # active sub-grid shape (1 on inactive axes)
    G: np.ndarray
    dG: np.ndarray  # (..., k, a, b)
    Ginv: np.ndarray
    Gam: np.ndarray
    dGam: np.ndarray  # (..., k, l, m, v)
    M: np.ndarray  # symmetric square root of G
    E: np.ndarray  # frame, inverse of M
    conn: np.ndarray
    vol: np.ndarray  # sqrt(det G)

    @property
    def p(self):
        return self.model.p

    @property
    def q(self):
        return self.model.q

    @property
    def n(self):
        return self.model.n

    @property
    def eps(self):
        return self.model.eps

    @property
    def full_shape(self):
        return (self.N,) * self.n

    @property
    def cell_volume(self):
        return float(self.N) ** (-self.n)

    @property
    def F(self):
        return slice(0, self.p)

    @property
    def P(self):
        return slice(self.p, self.n)

    # curvature ---------------------------------------------------------------
    def riemann(self):
        return curvature_of(self.Gam, self.dGam)

    def riemann_leaf(self):
        """Curvature of ``nabla^F = p nabla p`` on the coordinate frame of F."""
        return curvature_of(self.Gam, self.dGam, self.F)

    def riemann_perp(self):
        """Curvature of ``nabla^{F-perp} = p_perp nabla p_perp``."""
        return curvature_of(self.Gam, self.dGam, self.P)

    def scalar_curvature(self):
        R = self.riemann()
        ric = np.einsum("...rsrv->...sv", R)
        return np.einsum("...sv,...sv->...", self.Ginv, ric)

    def fibre_frame(self, R, sl=slice(None)):
        """Fibre indices of a block curvature moved to the orthonormal frame:
        ``out[..., d, c, m, v] = <R(d_m, d_v) E_c, E_d>``."""
        M = self.M[..., sl, sl]
        E = self.E[..., sl, sl]
        return np.einsum("...dr,...rsmv,...sc->...dcmv", M, R, E)

    def frame_form(self, R):
        """Form indices moved to the frame as well:
        ``out[..., d, c, a, b] = <R(E_a, E_b) E_c, E_d>``."""
        return np.einsum("...dcmv,...ma,...vb->...dcab", R, self.E, self.E)

    # pieces of the connection -------------------------------------------------
    def S_tensor(self):
        """``S[..., mu, b, a] = <S(d_mu) E_a, E_b>``: mixed blocks of conn."""
        S = self.conn.copy()
        S[..., self.F, self.F] = 0.0
        S[..., self.P, self.P] = 0.0
        return S

    def omega_coord(self):
        """``omega(d_i) = GP^-1 d_i GP`` for leaf coordinates ``i``."""
        P = self.P
        return self.Ginv[..., None, P, P] @ self.dG[..., self.F, P, P]

    def omega_frame(self):
        """``omega(f_i)`` as symmetric matrices in the orthonormal frame of
        ``g^{F-perp}`` (independent of eps): ``W[..., i, s, t]``."""
        P = self.P
        Mp = self.M[..., None, P, P]
        Ep = self.E[..., None, P, P]
        Wc = Mp @ self.omega_coord() @ Ep  # per coordinate direction
        EF = self.E[..., self.F, self.F]  # (..., mu, i)
        return np.einsum("...mi,...mst->...ist", EF, Wc)

    def broadcast(self, a):
        """View of a cached field on the full grid (no copy)."""
        return np.broadcast_to(a, self.full_shape + a.shape[self.n:])


def _sample_blocks(m, shape):
    GF = np.empty(shape + (m.p, m.p))
    GP = np.empty(shape + (m.q, m.q))
    for i in range(m.p):
        for j in range(m.p):
            GF[..., i, j] = m.GF[i][j].sample(shape)
    for i in range(m.q):
        for j in range(m.q):
            GP[..., i, j] = m.GP[i][j].sample(shape)
    return GF, GP


def _spectral_grad(A, n, active):
    """``out[..., k, a, b] = d_k A[..., a, b]`` by Fourier differentiation."""
    out = np.zeros(A.shape[:n] + (n,) + A.shape[n:])
    for k in active:
        out[..., k, :, :] = spectral_derivative(A, k)
    return out


def build_cache(m, N):
    """Sample the metric of ``m`` on an ``N^n`` grid and assemble the
    pointwise Levi-Civita geometry of ``g^F + g^{F-perp} / eps``."""
    bw = m.bandwidth
    need = min_resolution(bw)
    if N < need:
        raise AliasingError(f"N={N} is below the anti-aliasing minimum {need} "
                            f"for metric bandwidth {bw}")
    n, p = m.n, m.p
    active = m.active_axes()
    shape = tuple(N if j in active else 1 for j in range(n))
    GF, GP = _sample_blocks(m, shape)
    for blk, tag in ((GF, "GF"), (GP, "GP")):
        lam = np.linalg.eigvalsh(blk)
        if np.any(lam <= 0):
            bad = np.unravel_index(np.argmin(lam[..., 0]), lam.shape[:-1])
            raise MetricNotPositiveError(f"{tag} is not positive definite at grid index {bad}")
    G = _blockdiag(GF, GP / m.eps)
    dG = _spectral_grad(G, n, active)
    ddG = np.zeros(G.shape[:n] + (n, n, n, n))
    # second derivatives d_k d_j g_ab
    for j in active:
        djG = dG[..., j, :, :]
        for k in active:
            ddG[..., k, j, :, :] = spectral_derivative(djG, k)
    Ginv = np.linalg.inv(G)
    # lowered Christoffels Gl[r, m, v] = (d_m g_rv + d_v g_rm - d_r g_mv) / 2
    dGt = np.moveaxis(dG, -3, -1)  # (..., a, b, k) = d_k g_ab
    Gl = 0.5 * (np.einsum("...rvm->...rmv", dGt) + dGt - np.einsum("...mvr->...rmv", dGt))
    Gam = np.einsum("...lr,...rmv->...lmv", Ginv, Gl)
    # derivatives
    dGl = np.empty(G.shape[:n] + (n, n, n, n))
    for k in range(n):
        dk = ddG[..., k, :, :, :]  # (..., j, a, b) = d_k d_j g_ab
        dkt = np.moveaxis(dk, -3, -1)  # (..., a, b, j)
        dGl[..., k, :, :, :] = 0.5 * (np.einsum("...rvm->...rmv", dkt) + dkt
                                      - np.einsum("...mvr->...rmv", dkt))
    dGinv = -np.einsum("...la,...kab,...br->...klr", Ginv, dG, Ginv)
    dGam = (np.einsum("...klr,...rmv->...klmv", dGinv, Gl)
            + np.einsum("...lr,...krmv->...klmv", Ginv, dGl))
    # orthonormal frame from symmetric square roots, block by block
    MF, MFi, dMF = _sym_sqrt_and_derivative(GF, dG[..., :p, :p])
    MP, MPi, dMP = _sym_sqrt_and_derivative(G[..., p:, p:], dG[..., p:, p:])
    M = _blockdiag(MF, MP)
    E = _blockdiag(MFi, MPi)
    dM = _blockdiag(dMF, dMP)
    dE = -E[..., None, :, :] @ dM @ E[..., None, :, :]
    GamMu = np.moveaxis(Gam, -3, -2)  # (..., m, l, v)
    conn = M[..., None, :, :] @ (dE + GamMu @ E[..., None, :, :])
    vol = np.sqrt(np.linalg.det(G))
    return GridGeometryCache(m, N, shape, G, dG, Ginv, Gam, dGam, M, E, conn, vol)
