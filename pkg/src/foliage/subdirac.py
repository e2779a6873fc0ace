"""Matrix-free sub-Dirac operator, Bochner Laplacian and the curvature
endomorphism of its Lichnerowicz formula on a coordinate-foliated torus.

Sections are complex arrays of shape ``(N,)*n + (d,)``.  With the frame
``E_a`` and the connection ``nabla~`` of the fibre (the tensor-product
connection corrected by ``(1/2) sum <S(.) f_j, h_s> c(f_j) c(h_s)``):

* ``D u = sum_a c(E_a) nabla~_{E_a} u``, which expands to the four sums of
  the operator definition (the S-correction produces the two cubic terms);
* ``Delta u = sum_a nabla~_{E_a} nabla~_{E_a} u - nabla~_{Y} u`` with
  ``Y = sum_a nabla_{E_a} E_a``, the grouped form of the Bochner Laplacian.

All derivatives are Fourier-spectral.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .clifford import build_fiber, lift_connection, s_correction
from .geometry import build_cache
from .kernels import pointwise_apply
from .trig import spectral_derivative, wavenumbers

TERM_NAMES = ("phi_FF", "phi_FP", "phi_PP", "scalar", "perp_FP", "perp_FF", "perp_PP")


@dataclass
class LinearOperatorHandle:
    apply: Callable
    tag: str
    full_shape: tuple
    d: int
    weight: np.ndarray  # volume density times cell volume, broadcastable

    @property
    def size(self):
        return int(np.prod(self.full_shape)) * self.d

    def __call__(self, u):
        return self.apply(u)

    def inner(self, u, v):
        """``sum_x <u(x), v(x)> sqrt(det g) dx`` (conjugate-linear in u)."""
        return complex(np.sum(np.sum(np.conj(u) * v, axis=-1) * self.weight))

    def norm(self, u):
        return float(np.sqrt(max(self.inner(u, u).real, 0.0)))


def resample(u, axis, M):
    """Trigonometric interpolation of periodic samples along ``axis`` onto
    ``M`` points (truncation to the centred band when ``M`` is smaller)."""
    N = u.shape[axis]
    if M == N:
        return u
    U = np.fft.fft(u, axis=axis)
    k = np.fft.fftfreq(N, 1.0 / N).astype(int)
    half = min(N, M) // 2
    keep = np.nonzero((k >= -half) & (k < half))[0]
    shape = list(u.shape)
    shape[axis] = M
    out = np.zeros(shape, dtype=np.complex128)
    src = [slice(None)] * u.ndim
    dst = [slice(None)] * u.ndim
    src[axis], dst[axis] = keep, k[keep] % M
    out[tuple(dst)] = U[tuple(src)]
    return np.fft.ifft(out, axis=axis) * (M / N)


def dealias_resolution(N, pad=1.5):
    M = int(np.ceil(pad * N))
    return M + (M % 2)


class SubDiracSystem:
    """Coefficient fields shared by ``D``, ``Delta`` and the endomorphism.

    Sections live on the ``N^n`` grid of ``cache``.  With ``dealias`` the
    products with metric fields are formed on a grid refined along the
    active axes and projected back, so each operator is the Fourier-Galerkin
    projection of its continuum counterpart.
    """

    def __init__(self, cache, fiber, dealias=True, pad=1.5):
        if (cache.p, cache.q) != (fiber.p, fiber.q):
            raise ValueError(f"cache has (p, q) = ({cache.p}, {cache.q}) but the fibre "
                             f"was built for ({fiber.p}, {fiber.q})")
        self.coarse, self.fiber = cache, fiber
        self.N = cache.N
        active = cache.model.active_axes()
        self.active = tuple(active) if dealias else ()
        self.M = dealias_resolution(self.N, pad) if self.active else self.N
        fine = build_cache(cache.model, self.M) if self.active else cache
        self.cache = fine
        n = cache.n
        self.n = n
        self.c = fiber.c_frame()
        E = fine.E  # (..., mu, a)
        A = lift_connection(fine, fiber) + s_correction(fine, fiber)
        self.Ba = np.einsum("...ma,...mij->...aij", E, A)  # nabla~_{E_a} = E_a + Ba
        del A
        self.B = np.einsum("aij,...ajk->...ik", self.c, self.Ba)
        # Y = sum_a nabla_{E_a} E_a = sum_b y_b E_b
        y = np.einsum("...ma,...mba->...b", E, fine.conn)
        divE = np.zeros_like(y)
        for mu in self.active:
            divE += spectral_derivative(E[..., mu, :], mu)
        # zeroth-order part of the divergence form of sum_a nabla_a nabla_a - nabla_Y
        self.shift = divE + y
        self.E = E
        self.weight = cache.vol * cache.cell_volume
        self.grid_shape = tuple(self.M if j in self.active else self.N for j in range(n))

    @property
    def d(self):
        return self.fiber.dim

    @property
    def full_shape(self):
        return self.coarse.full_shape

    def _check(self, u):
        if u.shape != self.full_shape + (self.d,):
            raise ValueError(f"section has shape {u.shape}, expected "
                             f"{self.full_shape + (self.d,)}")

    def _up(self, u):
        for ax in self.active:
            u = resample(u, ax, self.M)
        return u

    def _down(self, u):
        for ax in self.active:
            u = resample(u, ax, self.N)
        return u

    def _wrap(self, fn):
        def apply(u):
            self._check(u)
            return self._down(fn(self._up(np.asarray(u, dtype=np.complex128))))
        return apply

    def _directional(self, u):
        """``w[a] = E_a u``, the plain derivative along each frame vector."""
        w = [None] * self.n
        for mu in range(self.n):
            du = spectral_derivative(u, mu)
            for a in range(self.n):
                e = self._nonzero(mu, a)
                if e is not None:
                    w[a] = e[..., None] * du if w[a] is None else w[a] + e[..., None] * du
        return [np.zeros_like(u) if x is None else x for x in w]

    def _D(self, u):
        out = pointwise_apply(self.B, u)
        for a, w in enumerate(self._directional(u)):
            out += w @ self.c[a].T
        return out

    def _nonzero(self, mu, a):
        e = self.E[..., mu, a]
        return e if np.any(e) else None

    def _laplacian(self, u):
        n = self.n
        v = self._directional(u)
        for a in range(n):
            pointwise_apply(self.Ba[..., a, :, :], u, out=v[a])
        acc = np.zeros_like(u)
        for a in range(n):
            pointwise_apply(self.Ba[..., a, :, :], v[a], out=acc)
            acc -= self.shift[..., a, None] * v[a]
        for mu in range(n):
            w = np.zeros_like(u)
            for a in range(n):
                e = self._nonzero(mu, a)
                if e is not None:
                    w += e[..., None] * v[a]
            acc += spectral_derivative(w, mu)
        return acc

    def apply_D(self, u):
        return self._wrap(self._D)(u)

    def apply_laplacian(self, u):
        return self._wrap(self._laplacian)(u)

    def apply_rhs(self, u, K):
        return self._wrap(lambda w: pointwise_apply(K, w, out=-self._laplacian(w)))(u)

    def covariant(self, a, u):
        """``nabla~_{E_a} u`` on the working grid."""
        out = pointwise_apply(self.Ba[..., a, :, :], u)
        for mu in range(self.n):
            e = self._nonzero(mu, a)
            if e is not None:
                out += e[..., None] * spectral_derivative(u, mu)
        return out

    # curvature endomorphism --------------------------------------------------
    def endomorphism_terms(self, **kw):
        return endomorphism_terms(self.cache, self.fiber, **kw)

    def endomorphism(self, **kw):
        return sum_terms(self.endomorphism_terms(**kw))


def perp_curvature_frame(cache, frame_cache=None):
    """``Rf[..., s, t, a, b] = <R^{F-perp}(E_a, E_b) E_t, E_s>`` with the
    curvature taken from ``cache`` and the frame from ``frame_cache``."""
    fc = frame_cache or cache
    return fc.frame_form(fc.fibre_frame(cache.riemann_perp(), fc.P))


def endomorphism_terms(cache, fiber, Rf=None, k=None, prefactors=None):
    """The seven curvature terms of the Lichnerowicz formula as matrix
    fields on ``cache``'s grid, keyed by ``TERM_NAMES``.

    ``Rf`` and ``k`` default to the cache's own curvature; the optional
    ``prefactors`` multiply the named terms.
    """
    p, n = cache.p, cache.n
    Rf = perp_curvature_frame(cache) if Rf is None else Rf
    k = cache.scalar_curvature() if k is None else k
    c = fiber.c_frame()
    cc = c[:, None] @ c[None, :]  # (a, b, d, d)
    hh = fiber.chatP[:, None] @ fiber.chatP[None, :]  # (s, t, d, d)
    Lphi = fiber.phi_generators  # (s, t, d, d)
    F = np.arange(n) < p
    blocks = {"FF": np.outer(F, F), "FP": np.outer(F, ~F) | np.outer(~F, F),
              "PP": np.outer(~F, ~F)}
    out = {}
    for name, mask in blocks.items():
        ccm = cc * mask.astype(float)[:, :, None, None]
        # (1/2) sum_ab c_a c_b R^phi(E_a, E_b)
        out["phi_" + name] = 0.5 * np.einsum("...stab,abij,stjk->...ik", Rf, ccm, Lphi,
                                             optimize=True)
        # (1/8) sum_ab sum_st <R(E_a, E_b) E_t, E_s> c_a c_b ch_s ch_t
        out["perp_" + name] = 0.125 * np.einsum("...stab,abij,stjk->...ik", Rf, ccm, hh,
                                                optimize=True)
    out["scalar"] = (np.asarray(k) / 4.0)[..., None, None] * np.eye(fiber.dim)
    for key, val in (prefactors or {}).items():
        out[key] = out[key] * val
    return {key: out[key] for key in TERM_NAMES}


def sum_terms(terms):
    shape = np.broadcast_shapes(*[t.shape for t in terms.values()])
    K = np.zeros(shape, dtype=np.complex128)
    for t in terms.values():
        K = K + t
    return K


# ---------------------------------------------------------------------------
# public assembly

def _fiber(m, fiber, phi=None):
    if fiber is not None:
        return fiber
    return build_fiber(m.p, m.q, phi if phi is not None else (m.phi or None))


def operators(m, cache, fiber=None, phi=None, K=None, dealias=True):
    """``{"D", "Delta", "RHS"}`` handles sharing one set of coefficient
    fields; ``K`` overrides the curvature endomorphism (on the working grid)."""
    if cache is None:
        raise ValueError("a geometry cache is required")
    s = SubDiracSystem(cache, _fiber(m, fiber, phi), dealias=dealias)
    K = s.endomorphism() if K is None else K(s) if callable(K) else K

    def h(fn, tag):
        return LinearOperatorHandle(fn, tag, s.full_shape, s.d, s.weight)

    return {"D": h(s.apply_D, "D"), "Delta": h(s.apply_laplacian, "Delta"),
            "RHS": h(lambda u: s.apply_rhs(u, K), "RHS"), "system": s}


def assemble_subdirac(m, cache, fiber=None, phi=None, dealias=True):
    return operators(m, cache, fiber, phi, K=0.0, dealias=dealias)["D"]


def bochner_laplacian(m, cache, fiber=None, phi=None, dealias=True):
    return operators(m, cache, fiber, phi, K=0.0, dealias=dealias)["Delta"]


def lichnerowicz_rhs(m, cache, fiber=None, phi=None, dealias=True):
    """``-Delta`` plus the seven-term curvature endomorphism."""
    return operators(m, cache, fiber, phi, dealias=dealias)["RHS"]


def squared(op):
    return LinearOperatorHandle(lambda u: op.apply(op.apply(u)), op.tag + "^2",
                                op.full_shape, op.d, op.weight)


def eps_endomorphism_terms(m, eps, N, fiber=None):
    """Curvature terms of the eps-scaled formula on the ``N`` grid, built
    from ``g^TM``-orthonormal frame components of ``R^{F-perp, eps}`` with
    the explicit ``sqrt(eps)`` and ``eps`` prefactors and ``k_{TM,eps}/4``.
    """
    fiber = _fiber(m, fiber)
    cache_eps = build_cache(m.with_eps(eps), N)
    cache_unit = build_cache(m.with_eps(1.0), N)
    Rf = perp_curvature_frame(cache_eps, frame_cache=cache_unit)
    r = float(np.sqrt(eps))
    pref = {"phi_FP": r, "phi_PP": eps, "perp_FP": r, "perp_PP": eps}
    return endomorphism_terms(cache_unit, fiber, Rf=Rf, k=cache_eps.scalar_curvature(),
                              prefactors=pref)


def assemble_eps_scaled(m, eps, N, fiber=None, phi=None, dealias=True):
    """``(D_eps, RHS_eps)`` for ``g^F + g^{F-perp}/eps`` on the ``N`` grid,
    the curvature endomorphism taken in its explicitly rescaled form."""
    fiber = _fiber(m, fiber, phi)
    me = m.with_eps(eps)

    def K(s):
        return sum_terms(eps_endomorphism_terms(m, eps, s.M, fiber))

    ops = operators(me, build_cache(me, N), fiber, K=K, dealias=dealias)
    return ops["D"], ops["RHS"]


# ---------------------------------------------------------------------------
# probes

def random_section(shape, d, bandwidth, rng):
    """Random smooth section with Fourier modes ``|k|_inf <= bandwidth``,
    normalised to unit l2 norm of its samples."""
    n = len(shape)
    coef = np.zeros(shape + (d,), dtype=np.complex128)
    idx = [np.r_[0:bandwidth + 1, -bandwidth:0] % N for N in shape]
    sub = np.ix_(*idx)
    block = tuple(len(i) for i in idx) + (d,)
    coef[sub] = rng.standard_normal(block) + 1j * rng.standard_normal(block)
    u = np.fft.ifftn(coef, axes=tuple(range(n)))
    return u / np.linalg.norm(u)


def lichnerowicz_residual(m, N_list, trials=3, seed=42, bandwidth=2, eps=None, phi=None,
                          dealias=True):
    """``r(N) = max_trials ||D^2 u - RHS u|| / ||u||`` per resolution.

    With ``eps`` set, the eps-scaled operators are used.
    """
    rng = np.random.default_rng(seed)
    out = {}
    for N in N_list:
        fiber = _fiber(m, None, phi)
        if eps is None:
            ops = operators(m, build_cache(m, N), fiber, dealias=dealias)
            D, rhs = ops["D"], ops["RHS"]
        else:
            D, rhs = assemble_eps_scaled(m, eps, N, fiber, dealias=dealias)
        worst = 0.0
        for _ in range(trials):
            u = random_section(D.full_shape, D.d, min(bandwidth, N // 4), rng)
            r = D(D(u)) - rhs(u)
            worst = max(worst, D.norm(r) / D.norm(u))
            del r
        out[N] = worst
    return out


def operator_structure_report(m, N, trials=50, seed=42, bandwidth=None, phi=None,
                              grading_tol=1e-9, symmetry_tol=1e-8, psd_tol=1e-8,
                              linear_tol=1e-11):
    """Structural probes on random bandlimited sections: linearity of D,
    ``D Gamma + Gamma D = 0``, ``<Du, v> = <u, Dv>``, the same symmetry for
    Delta, and ``<-Delta u, u> >= 0``.  Each row records the worst value."""
    from .report import Report

    fiber = _fiber(m, None, phi)
    ops = operators(m, build_cache(m, N), fiber, K=0.0)
    D, lap = ops["D"], ops["Delta"]
    G = fiber.grading
    bw = bandwidth or max(1, N // 4)
    rng = np.random.default_rng(seed)
    worst = dict(linear=0.0, grading=0.0, D_sym=0.0, lap_sym=0.0, psd=np.inf)
    for _ in range(trials):
        u = random_section(D.full_shape, D.d, bw, rng)
        # overlap with u keeps <Du, v> away from zero
        v = 0.5 * u + random_section(D.full_shape, D.d, bw, rng)
        a, b = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
        Du, Dv = D(u), D(v)
        lin = D(a * u + b * v) - (a * Du + b * Dv)
        worst["linear"] = max(worst["linear"],
                              D.norm(lin) / max(D.norm(a * Du + b * Dv), 1e-300))
        anti = D(u @ G.T) + Du @ G.T
        worst["grading"] = max(worst["grading"], D.norm(anti) / max(D.norm(Du), 1e-300))
        worst["D_sym"] = max(worst["D_sym"], abs(D.inner(Du, v) - D.inner(u, Dv))
                             / max(D.norm(Du) * D.norm(v), D.norm(u) * D.norm(Dv), 1e-300))
        Lu, Lv = lap(u), lap(v)
        worst["lap_sym"] = max(worst["lap_sym"], abs(D.inner(Lu, v) - D.inner(u, Lv))
                               / max(D.norm(Lu) * D.norm(v), D.norm(u) * D.norm(Lv), 1e-300))
        q = -D.inner(u, Lu).real / D.inner(u, u).real
        worst["psd"] = min(worst["psd"], q)
    rep = Report()
    name = m.name
    rep.add("operator_structure", "linearity", "2.17", worst["linear"] <= linear_tol, name,
            lhs=f"{worst['linear']:.3g}", rhs=f"<= {linear_tol:g}",
            detail=f"N={N}, {trials} random pairs")
    rep.add("operator_structure", "anticommutes_with_grading", "2.17",
            worst["grading"] <= grading_tol, name, lhs=f"{worst['grading']:.3g}",
            rhs=f"<= {grading_tol:g}", detail=f"||D Gu + G Du|| / ||Du||, N={N}")
    rep.add("operator_structure", "D_symmetric", "2.18", worst["D_sym"] <= symmetry_tol, name,
            lhs=f"{worst['D_sym']:.3g}", rhs=f"<= {symmetry_tol:g}",
            detail=f"|<Du,v> - <u,Dv>| relative, N={N}")
    rep.add("operator_structure", "laplacian_symmetric", "2.19",
            worst["lap_sym"] <= symmetry_tol, name, lhs=f"{worst['lap_sym']:.3g}",
            rhs=f"<= {symmetry_tol:g}", detail=f"N={N}")
    rep.add("operator_structure", "minus_laplacian_nonnegative", "2.41",
            worst["psd"] >= -psd_tol, name, lhs=f"{worst['psd']:.3g}", rhs=f">= {-psd_tol:g}",
            detail="min Rayleigh quotient of -Delta over random sections")
    return rep, worst


class SpectrumError(RuntimeError):
    pass


def low_spectrum(op, count, band=None, seed=42, tol=1e-6, maxiter=400,
                 dense_limit=4096, block=None, accept=1e-4):
    """Smallest ``count`` eigenvalues of ``op`` by Rayleigh-Ritz on sections
    with Fourier modes ``|k|_inf <= band`` (default ``N // 4``).

    The Ritz problem ``<phi_i, op phi_j> x = lambda <phi_i, phi_j> x`` uses the
    volume-weighted inner product; no symmetrisation is applied, the discrete
    operators being self-adjoint to round-off on this subspace.  Dense when
    the subspace dimension is at most ``dense_limit``, otherwise LOBPCG with
    a fixed random start and a diagonal Fourier preconditioner; the returned
    Ritz pairs must have relative residual at most ``accept`` (eigenvalue
    error is of the order of its square).
    """
    from scipy.linalg import eigh
    from scipy.sparse.linalg import LinearOperator, lobpcg

    shape, d = op.full_shape, op.d
    n = len(shape)
    band = min(N // 4 for N in shape) if band is None else band
    idx = [np.r_[0:band + 1, -band:0] % N for N in shape]
    sub = np.ix_(*idx)
    bshape = tuple(len(i) for i in idx) + (d,)
    size = int(np.prod(bshape))
    w = np.broadcast_to(op.weight, shape)[..., None]
    axes = tuple(range(n))

    def synth(x):
        c = np.zeros(shape + (d,), dtype=np.complex128)
        c[sub] = x.reshape(bshape)
        return np.fft.ifftn(c, axes=axes, norm="ortho")

    def analyse(u):
        return np.fft.fftn(u, axes=axes, norm="ortho")[sub].reshape(-1)

    def columns(fn):
        def apply(X):
            X = np.asarray(X)
            if X.ndim == 1:
                return fn(X)
            return np.column_stack([fn(X[:, j]) for j in range(X.shape[1])])
        return apply

    A_mv = columns(lambda x: analyse(w * op.apply(synth(x))))
    B_mv = columns(lambda x: analyse(w * synth(x)))
    if size <= dense_limit:
        I = np.eye(size, dtype=np.complex128)
        vals = eigh(A_mv(I), B_mv(I), eigvals_only=True, subset_by_index=[0, count - 1])
        return np.sort(vals)
    kk = np.meshgrid(*[wavenumbers(N)[i] for N, i in zip(shape, idx)], indexing="ij")
    pre = 1.0 / (1.0 + sum(k ** 2 for k in kk))
    pre = np.repeat(pre[..., None], d, axis=-1).reshape(-1)
    rng = np.random.default_rng(seed)
    k = block or count + max(4, count // 2)
    X = rng.standard_normal((size, k)) + 1j * rng.standard_normal((size, k))

    def lin(f):
        return LinearOperator((size, size), matvec=f, matmat=f, dtype=np.complex128)

    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        vals, vecs = lobpcg(lin(A_mv), X, B=lin(B_mv), M=lin(columns(lambda x: pre * x)),
                            tol=tol, maxiter=maxiter, largest=False)
    order = np.argsort(vals.real)[:count]
    vals, vecs = vals.real[order], vecs[:, order]
    AX, BX = A_mv(vecs), B_mv(vecs)
    res = np.linalg.norm(AX - BX * vals, axis=0) / np.maximum(
        np.linalg.norm(AX, axis=0), np.linalg.norm(BX, axis=0))
    if np.max(res) > accept:
        raise SpectrumError(f"eigensolver did not converge after {maxiter} iterations: "
                            f"relative residual {np.max(res):.3g} > {accept:g}")
    return vals


def eps_term_operator(m, eps, N, names, fiber=None):
    """Multiplication by the sum of the named eps-scaled curvature terms."""
    fiber = _fiber(m, fiber)
    cache = build_cache(m.with_eps(eps), N)
    terms = eps_endomorphism_terms(m, eps, N, fiber)
    K = sum_terms({k: terms[k] for k in names})
    weight = cache.vol * cache.cell_volume
    return LinearOperatorHandle(lambda u: pointwise_apply(K, u), "+".join(names),
                                cache.full_shape, fiber.dim, weight)


def positivity_probe(family, sigmas, eps_list, N, count=1, fiber=None):
    """Smallest eigenvalues of ``D_eps^2`` and ``-Delta_eps`` per
    ``(sigma, eps)`` and their gap; the report checks that the gap stays
    within a factor 2 across the eps schedule (ungated probe).
    """
    from .report import Report

    rows = []
    rep = Report()
    for sg in sigmas:
        gaps = []
        for e in eps_list:
            m = family(sg)
            fb = _fiber(m, fiber)
            D, _ = assemble_eps_scaled(m, e, N, fb)
            lap = operators(m.with_eps(e), build_cache(m.with_eps(e), N), fb, K=0.0)["Delta"]
            neg = LinearOperatorHandle(lambda u, L=lap: -L(u), "-Delta", lap.full_shape,
                                       lap.d, lap.weight)
            lam_d = float(low_spectrum(squared(D), count)[0])
            lam_l = float(low_spectrum(neg, count)[0])
            gaps.append(lam_d - lam_l)
            rows.append({"model": m.name, "N": N, "epsilon": e, "phi": _phi_tag(m),
                         "quantity": "lambda_min_D2", "value": lam_d})
            rows.append({"model": m.name, "N": N, "epsilon": e, "phi": _phi_tag(m),
                         "quantity": "lambda_min_minus_laplacian", "value": lam_l})
        lo, hi = min(gaps), max(gaps)
        mags = [abs(g) for g in gaps]
        stable = (lo > 0 or hi < 0) and max(mags) <= 2 * min(mags)
        rep.add("positivity_probe", "eigenvalue_gap_stable_across_eps", "2.41", stable,
                f"sigma={sg:g}", lhs=f"{lo:.6g}", rhs=f"{hi:.6g}", gated=False,
                detail="min and max of lambda_min(D^2) - lambda_min(-Delta) over eps")
        rep.add("positivity_probe", "eigenvalue_gap_positive", "2.41", lo > 0,
                f"sigma={sg:g}", lhs=f"{lo:.6g}", rhs="> 0", gated=False,
                detail="needs positive leafwise scalar curvature, impossible for 2-torus leaves")
    return rows, rep


def _phi_tag(m):
    if not m.phi:
        return "trivial"
    return "+".join(f"{mult}{kind}{k}" for kind, k, mult in m.phi)


# ---------------------------------------------------------------------------
# exact check on left-invariant sections of a frame model

class _GaussMatrix:
    """Matrix over Q(i) stored as two object arrays of Fractions."""

    def __init__(self, re, im):
        self.re, self.im = re, im

    @classmethod
    def from_float(cls, A, den=64):
        A = np.asarray(A, dtype=np.complex128)

        def conv(x):
            f = Fraction(float(x)).limit_denominator(den)
            if abs(float(f) - float(x)) > 1e-12:
                raise ValueError(f"matrix entry {x!r} is not a small rational")
            return f

        vconv = np.vectorize(conv, otypes=[object])
        return cls(vconv(A.real), vconv(A.imag))

    @classmethod
    def zeros(cls, d):
        z = np.full((d, d), Fraction(0), dtype=object)
        return cls(z, z.copy())

    def __add__(self, o):
        return _GaussMatrix(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return _GaussMatrix(self.re - o.re, self.im - o.im)

    def __matmul__(self, o):
        return _GaussMatrix(self.re @ o.re - self.im @ o.im, self.re @ o.im + self.im @ o.re)

    def scale(self, s):
        s = Fraction(s)
        return _GaussMatrix(self.re * s, self.im * s)

    def is_zero(self):
        return not any(x != 0 for x in self.re.flat) and not any(x != 0 for x in self.im.flat)

    def max_abs(self):
        return max(abs(float(x)) for x in list(self.re.flat) + list(self.im.flat))


def _frac(x):
    from .exact import ExactScalar
    if isinstance(x, ExactScalar):
        return x.constant_value()
    return Fraction(x)


def frame_lichnerowicz_check(m, phi=None, drop=()):
    """Exact test of the seven-term curvature endomorphism on a frame model.

    On left-invariant sections the sub-Dirac operator and the Bochner
    Laplacian reduce to constant matrices, ``D = sum_x c_x A_x`` and
    ``Delta = sum_x A_x^2 - sum_b y_b A_b``, so the identity
    ``D^2 = -Delta + K`` is checked in Gaussian-rational arithmetic, with
    every term of ``K`` built from the exact frame-model curvature at
    ``eps = 1``.  Terms named in ``drop`` are left out of ``K``.
    """
    from .calculus import FrameCalculus
    from .frames import riemann, scalar_curvature_full, unit_connection
    from .report import Report

    fb = build_fiber(m.p, m.q, phi)
    p, n, d = m.p, m.n, fb.dim
    G = unit_connection(m).gamma  # G[x][a][b] = <nabla_{E_x} E_a, E_b>
    g = [[[_frac(G[x][a][b]) for b in range(n)] for a in range(n)] for x in range(n)]
    gm = _GaussMatrix.from_float
    c = [gm(ci) for ci in fb.c_frame()]
    ch = [gm(ci) for ci in fb.chatP]
    spin = [[gm(fb.spin_generators[a, b]) for b in range(p)] for a in range(p)]
    twist = [[gm(fb.ext_generators[a, b] + fb.phi_generators[a, b]) for b in range(m.q)]
             for a in range(m.q)]
    mixed = [[gm(fb.mixed_generators[j, s]) for s in range(m.q)] for j in range(p)]
    Lphi = [[gm(fb.phi_generators[s, t]) for t in range(m.q)] for s in range(m.q)]

    def conn_matrix(x):
        A = _GaussMatrix.zeros(d)
        for a in range(p):
            for b in range(p):
                if g[x][a][b]:
                    A = A + spin[a][b].scale(g[x][a][b])
        for a in range(m.q):
            for b in range(m.q):
                v = g[x][p + b][p + a]
                if v:
                    A = A + twist[a][b].scale(v)
        for j in range(p):
            for s in range(m.q):
                v = g[x][j][p + s]
                if v:
                    A = A + mixed[j][s].scale(v)
        return A

    A = [conn_matrix(x) for x in range(n)]
    Dm = _GaussMatrix.zeros(d)
    for x in range(n):
        Dm = Dm + c[x] @ A[x]
    lap = _GaussMatrix.zeros(d)
    for x in range(n):
        lap = lap + A[x] @ A[x]
    for b in range(n):
        y = sum((g[a][a][b] for a in range(n)), Fraction(0))
        if y:
            lap = lap - A[b].scale(y)
    # exact curvature pieces
    fc = FrameCalculus(m)
    Rf = {}
    for a in range(n):
        for b in range(n):
            for t in range(m.q):
                vec = fc.curvature_perp(fc.basis(a), fc.basis(b), fc.basis(p + t))
                for s in range(m.q):
                    val = vec[p + s]
                    Rf[s, t, a, b] = val.constant_value() if val else Fraction(0)
    k = _frac(scalar_curvature_full(riemann(unit_connection(m))))
    F = set(range(p))

    def block(a, b):
        fa, fb_ = a in F, b in F
        return "FF" if fa and fb_ else "PP" if not (fa or fb_) else "FP"

    terms = {name: _GaussMatrix.zeros(d) for name in TERM_NAMES}
    for a in range(n):
        for b in range(n):
            cc = c[a] @ c[b]
            key = block(a, b)
            for s in range(m.q):
                for t in range(m.q):
                    v = Rf[s, t, a, b]
                    if not v:
                        continue
                    terms["phi_" + key] = terms["phi_" + key] + (cc @ Lphi[s][t]).scale(v / 2)
                    terms["perp_" + key] = (terms["perp_" + key]
                                            + (cc @ ch[s] @ ch[t]).scale(v / 8))
    eye = np.eye(d)
    terms["scalar"] = gm(eye).scale(k / 4)
    K = _GaussMatrix.zeros(d)
    for name, t in terms.items():
        if name not in drop:
            K = K + t
    rep = Report()
    lhs = Dm @ Dm
    resid = lhs + lap - K
    for name in TERM_NAMES:
        rep.add("lichnerowicz_exact", f"term_{name}", "2.20", True, m.name,
                lhs=f"{terms[name].max_abs():.6g}", rhs="", gated=False,
                detail="largest entry of the term on left-invariant sections")
    rep.add("lichnerowicz_exact", "D2_equals_minus_laplacian_plus_K", "2.20", resid.is_zero(),
            m.name, lhs=f"{resid.max_abs():.3g}", rhs="0",
            detail=f"exact over Q(i), k = {k}, fibre dimension {d}")
    return rep
