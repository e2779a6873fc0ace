"""Exact verification of the adiabatic-limit identities on frame models.

Every function returns a :class:`~foliage.report.Report` whose rows carry the
equation they check.  Failures record the first offending index tuple
(1-based frame indices) with both sides rendered canonically.
"""

from __future__ import annotations

import itertools
from .calculus import FrameCalculus
from .exact import ONE, T, ZERO, Diverges, as_exact, limit_at_zero
from .frames import (curvature_blocks, frame_christoffel, koszul_connection,
                     riemann, scalar_curvature_full, unit_connection)
from .report import Report

EPS = T * T
HALF = ONE / 2


class DivergingLimitError(ArithmeticError):
    """An adiabatic limit has a pole; F cannot be integrable."""


def _one_based(idx):
    return tuple(i + 1 for i in idx)


def _compare(report, suite, check, eq, model, pairs, gated=True, detail=""):
    """Record one row for ``check``: pass iff every (idx, lhs, rhs) agrees."""
    count = 0
    for idx, lhs, rhs in pairs:
        count += 1
        if as_exact(lhs) != as_exact(rhs):
            return report.add(suite, check, eq, False, model.name, _one_based(idx),
                              str(as_exact(lhs)), str(as_exact(rhs)), detail, gated)
    return report.add(suite, check, eq, True, model.name, (), "", "",
                      detail or f"{count} entries", gated)


# --------------------------------------------------------------------------
# connection laws

def verify_rescaling_laws(m):
    """Exact checks of how the Levi-Civita connection of ``g_eps`` depends on
    ``eps`` block by block."""
    rep = Report()
    F, P = list(m.F), list(m.P)
    A1 = frame_christoffel(unit_connection(m))
    Ae = frame_christoffel(koszul_connection(m))
    c = m.c
    suite = "rescaling"

    def sym(v, u, x):  # <x, nabla_v u + nabla_u v>
        return A1[v][u][x] + A1[u][v][x]

    _compare(rep, suite, "leaf_connection_along_F", "1.5", m,
             [((a, b, k), Ae[a][b][k], A1[a][b][k])
             for a in F for b in F for k in F])
    _compare(rep, suite, "leaf_connection_along_Fperp", "1.5", m,
             [((a, b, k), Ae[a][b][k], A1[a][b][k])
             for a in P for b in F for k in F])
    _compare(rep, suite, "p_nabla_X_pperp", "1.5", m,
             [((x, u, k), Ae[x][u][k], A1[x][u][k])
             for x in F for u in P for k in F])
    _compare(rep, suite, "transverse_into_leaf", "1.6", m,
             [((v, u, x), Ae[v][u][x],
              A1[v][u][x] - HALF * sym(v, u, x) + sym(v, u, x) / (2 * EPS))
             for v in P for u in P for x in F])
    _compare(rep, suite, "pperp_nabla_X_p", "1.7", m,
             [((x, y, u), Ae[x][y][u], EPS * A1[x][y][u])
             for x in F for y in F for u in P])
    _compare(rep, suite, "leaf_into_transverse", "1.7", m,
             [((v, y, u), Ae[v][y][u], -HALF * sym(v, u, y) + EPS / 2 * c[u][v][y])
             for v in P for y in F for u in P])
    _compare(rep, suite, "transverse_connection_along_Fperp", "1.8", m,
             [((v, u, w), Ae[v][u][w], A1[v][u][w])
             for v in P for u in P for w in P])
    _compare(rep, suite, "transverse_connection_along_F", "1.8", m,
             [((x, u, v), Ae[x][u][v],
              c[x][u][v] - HALF * sym(v, u, x) - EPS / 2 * c[u][v][x])
             for x in F for u in P for v in P])
    return rep


def verify_connection_table(m):
    table = koszul_connection(m)
    rep = Report()
    sk = table.skew_violations()
    rep.add("connection", "metric_compatibility", "1.4", not sk, m.name,
            _one_based(sk[0]) if sk else (), detail="Gamma[a][b][k] = -Gamma[a][k][b]")
    tv = table.torsion_violations()
    rep.add("connection", "torsion_free", "1.4", not tv, m.name,
            _one_based(tv[0]) if tv else (), detail="Gamma[a][b] - Gamma[b][a] = C[a][b]")
    return rep


# --------------------------------------------------------------------------
# Bott connection and omega

def bott_connection(m):
    """``B[i][u][v] = <p_perp [f_i, h_u], h_v>`` with i in F, u, v in F-perp
    (indices relative to the blocks)."""
    p, q = m.p, m.q
    return [[[as_exact(m.c[i][p + u][p + v]) for v in range(q)] for u in range(q)]
            for i in range(p)]


def omega_tensor(m):
    """``W[i][u][v] = omega(f_i)(h_u, h_v) = -<nabla_u v + nabla_v u, f_i>`` at
    ``eps = 1``; symmetric in ``(u, v)``."""
    p, q = m.p, m.q
    A1 = frame_christoffel(unit_connection(m))
    return [[[-(A1[p + u][p + v][i] + A1[p + v][p + u][i]) for v in range(q)]
             for u in range(q)] for i in range(p)]


def omega_five_term(m):
    """Unreduced form ``-<nabla_U V, X> - <nabla_V U, X> - <U, nabla_X V>
    - <nabla_X U, V> + X<U, V>`` together with its last three terms."""
    p, q = m.p, m.q
    A1 = frame_christoffel(unit_connection(m))
    full, tail = [], []
    for i in range(p):
        fr, tr = [], []
        for u in range(q):
            fu, tu = [], []
            for v in range(q):
                U, V = p + u, p + v
                last3 = -A1[i][V][U] - A1[i][U][V] + 0  # X<U, V> = 0 for frame fields
                fu.append(-A1[U][V][i] - A1[V][U][i] + last3)
                tu.append(last3)
            fr.append(fu)
            tr.append(tu)
        full.append(fr)
        tail.append(tr)
    return full, tail


def omega_from_bott(m):
    """``omega = nabla_dot^* - nabla_dot`` with the dual taken in ``g^Fperp``."""
    B = bott_connection(m)
    p, q = m.p, m.q
    # <dual_X U, V> = X<U,V> - <U, nabla_dot_X V> = -B[i][v][u]
    return [[[-B[i][v][u] - B[i][u][v] for v in range(q)] for u in range(q)]
            for i in range(p)]


def verify_omega(m):
    rep = Report()
    p, q = m.p, m.q
    W = omega_tensor(m)
    full, tail = omega_five_term(m)
    Wb = omega_from_bott(m)
    rng = list(itertools.product(range(p), range(q), range(q)))
    _compare(rep, "omega", "last_three_terms_cancel", "1.13", m,
             [((i, p + u, p + v), tail[i][u][v], 0) for i, u, v in rng])
    _compare(rep, "omega", "five_term_equals_reduced", "1.13", m,
             [((i, p + u, p + v), full[i][u][v], W[i][u][v]) for i, u, v in rng])
    _compare(rep, "omega", "reduced_equals_dual_minus_bott", "1.10", m,
             [((i, p + u, p + v), W[i][u][v], Wb[i][u][v]) for i, u, v in rng])
    _compare(rep, "omega", "symmetric", "1.10", m,
             [((i, p + u, p + v), W[i][u][v], W[i][v][u]) for i, u, v in rng])
    return rep


# --------------------------------------------------------------------------
# adiabatic limit

def adiabatic_limit(m):
    """``lim_{t->0}`` of the F-perp block of the connection along F, and the
    t-valuation of the finite-t deviation from ``bott + omega / 2``.

    Returns ``(limit, target, orders)`` indexed ``[i][u][v]``.
    """
    table = koszul_connection(m)
    p, q = m.p, m.q
    B = bott_connection(m)
    W = omega_tensor(m)
    limit, target, orders = [], [], []
    for i in range(p):
        lr, tr, orr = [], [], []
        for u in range(q):
            lu, tu, ou = [], [], []
            for v in range(q):
                g = table.gamma[i][p + u][p + v]
                lim = limit_at_zero(g)
                if isinstance(lim, Diverges):
                    raise DivergingLimitError(
                        f"limit of <nabla_f{i + 1} h{u + 1}, h{v + 1}> has a pole of order {lim.order}")
                tgt = B[i][u][v] + HALF * W[i][u][v]
                lu.append(lim)
                tu.append(tgt)
                ou.append((g - tgt).valuation())
            lr.append(lu)
            tr.append(tu)
            orr.append(ou)
        limit.append(lr)
        target.append(tr)
        orders.append(orr)
    return limit, target, orders


def adiabatic_limit_check(m):
    rep = Report()
    p, q = m.p, m.q
    limit, target, orders = adiabatic_limit(m)
    rng = list(itertools.product(range(p), range(q), range(q)))
    _compare(rep, "adiabatic", "limit_equals_bott_plus_half_omega", "1.12", m,
             [((i, p + u, p + v), limit[i][u][v], target[i][u][v]) for i, u, v in rng])
    worst = min((orders[i][u][v] for i, u, v in rng), default=float("inf"))
    eps_order = worst / 2
    rep.add("adiabatic", "deviation_order_in_eps", "1.8", eps_order >= 1, m.name,
            detail=f"min eps-order of deviation = {eps_order}")
    return rep


# --------------------------------------------------------------------------
# curvature expansions

def verify_curvature_expansion(m, printed=True):
    """Exact checks of the block-wise expansion of ``R^{TM,eps}``.

    Inner products are those of ``g^TM``; vectors are frame vectors.  When
    ``printed`` is true, the forms as typeset in the source are also
    reported, ungated, where they differ from the verified forms.
    """
    fc = FrameCalculus(m)
    add, I, sc = fc.add, fc.inner, fc.scale
    nb, ne, br = fc.nabla, fc.nabla_eps, fc.bracket
    p_, pp = fc.p_, fc.pperp
    F, P = list(m.F), list(m.P)
    rep = Report()
    suite = "curvature_expansion"

    # leaf block
    rows = []
    for i, j in itertools.product(F, F):
        X, Y = fc.basis(i), fc.basis(j)
        lhs = I(fc.curvature_eps(X, Y, X), Y)
        rhs = (I(fc.curvature_leaf(X, Y, X), Y) + EPS * I(nb(Y, Y), pp(nb(X, X)))
               - EPS * I(nb(X, Y), pp(nb(Y, X))))
        rows.append(((i, j), lhs, rhs))
    _compare(rep, suite, "leaf_block", "2.32", m, rows)

    # mixed block, both printed expressions
    first_rows, second_rows, printed_rows = [], [], []
    for i, u in itertools.product(F, P):
        X, U = fc.basis(i), fc.basis(u)
        lhs = I(fc.curvature_eps(X, U, X), U)
        xu = br(X, U)
        Xp = pp(ne(U, X))
        first = (EPS * I(nb(X, p_(nb(U, X))), U) - I(nb(U, p_(ne(X, X))), U)
                 - EPS * I(nb(p_(xu), X), U) - I(nb(pp(xu), X), U)
                 + HALF * I(X, br(U, pp(xu))) - EPS / 2 * I(X, br(U, pp(xu)))
                 - HALF * I(X, add(nb(Xp, U), nb(U, Xp)))
                 + I(br(X, Xp), U) + EPS / 2 * I(X, br(U, Xp))
                 - I(nb(U, pp(ne(X, X))), U))
        common = (-EPS * I(p_(nb(U, X)), nb(X, U)) - EPS * I(nb(p_(xu), X), U)
                  - EPS / 2 * I(X, br(U, pp(xu)))
                  - EPS * I(nb(U, pp(nb(X, X))), U) + I(p_(nb(X, X)), nb(U, U))
                  + HALF * I(X, add(nb(U, pp(xu)), nb(pp(xu), U)))
                  + I(br(X, Xp), U) - HALF * I(X, add(nb(Xp, U), nb(U, Xp))))
        second = common + EPS / 2 * I(X, br(U, Xp))
        as_printed = common + EPS / 2 * I(X, Xp)
        first_rows.append(((i, u), lhs, first))
        second_rows.append(((i, u), lhs, second))
        printed_rows.append(((i, u), lhs, as_printed))
    _compare(rep, suite, "mixed_block_expanded", "2.33", m, first_rows)
    _compare(rep, suite, "mixed_block_reduced", "2.33", m, second_rows,
             detail="term <X,[U, p_perp nabla^eps_U X]> in the reduced form")
    if printed:
        _compare(rep, suite, "mixed_block_reduced_as_printed", "2.33", m,
                 printed_rows, gated=False)

    # transverse block
    rows, printed_rows = [], []
    for u, v in itertools.product(P, P):
        U, V = fc.basis(u), fc.basis(v)
        lhs = I(fc.curvature_eps(U, V, U), V)
        pb = p_(br(U, V))
        rperp = I(fc.curvature_perp(U, V, U), V)
        om = ZERO
        for i in F:
            X = fc.basis(i)
            om = om + fc.omega(X, U, U) * fc.omega(X, V, V) - fc.omega(X, U, V) ** 2
        rhs = rperp - (HALF - 3 * EPS / 4) * I(pb, pb) + om / (4 * EPS)
        rows.append(((u, v), lhs, rhs))
        lit = (rperp + HALF * I(br(U, V), p_(add(nb(U, V), nb(V, U))))
               - (HALF - EPS) * I(pb, pb))
        printed_rows.append(((u, v), lhs, lit))
    _compare(rep, suite, "transverse_block", "2.34", m, rows,
             detail="coefficient (1/2 - 3 eps/4) and omega^2/(4 eps) term")
    if printed:
        _compare(rep, suite, "transverse_block_as_printed", "2.34", m,
                 printed_rows, gated=False)

    # p_perp nabla^eps_U X
    rows = []
    W = omega_tensor(m)
    p = m.p
    for i, u in itertools.product(F, P):
        X, U = fc.basis(i), fc.basis(u)
        lhs = pp(ne(U, X))
        for s in P:
            Hs = fc.basis(s)
            rhs = HALF * W[i][u - p][s - p] - EPS / 2 * I(X, br(U, Hs))
            rows.append(((i, u, s), lhs[s], rhs))
    _compare(rep, suite, "pperp_nabla_U_X", "2.35", m, rows)

    # scalar curvature block assembly versus the full contraction
    table = koszul_connection(m)
    R = riemann(table)
    blocks = curvature_blocks(table, R)
    full = scalar_curvature_full(R)
    rep.add(suite, "scalar_curvature_blocks", "2.31", blocks.scalar == full, m.name,
            lhs=str(blocks.scalar), rhs=str(full),
            detail="k = -(ff + eps*hh + 2*fh) in g-inner products")
    return rep


# --------------------------------------------------------------------------
# mixed tensor S

def mixed_tensor_s(m):
    """``S[a][b][k] = <S(e_a) e_b, e_k>`` at ``eps = 1``: the part of the
    Levi-Civita connection that moves between F and F-perp."""
    A1 = frame_christoffel(unit_connection(m))
    n, p = m.n, m.p
    return [[[A1[a][b][k] if (b < p) != (k < p) else ZERO for k in range(n)]
             for b in range(n)] for a in range(n)]


def verify_s_tensor(m):
    rep = Report()
    fc = FrameCalculus(m)
    S = mixed_tensor_s(m)
    n, p = m.n, m.p
    rows, skew, blocks = [], [], []
    for a in range(n):
        for b in range(n):
            A, B = fc.basis(a), fc.basis(b)
            rest = fc.add(fc.nabla(A, B), fc.scale(-1, fc.nabla_leaf(A, B)),
                          fc.scale(-1, fc.nabla_perp(A, B)))
            for k in range(n):
                rows.append(((a, b, k), S[a][b][k], rest[k]))
                skew.append(((a, b, k), S[a][b][k], -S[a][k][b]))
                if (b < p) == (k < p):
                    blocks.append(((a, b, k), S[a][b][k], 0))
    _compare(rep, "s_tensor", "s_equals_connection_remainder", "2.14", m, rows)
    _compare(rep, "s_tensor", "s_skew_adjoint", "2.14", m, skew)
    _compare(rep, "s_tensor", "s_exchanges_blocks", "2.14", m, blocks)
    return rep


# --------------------------------------------------------------------------
# flatness along the leaves

def _matmul(A, B):
    n = len(A)
    return [[sum((A[i][k] * B[k][j] for k in range(n) if A[i][k] and B[k][j]), ZERO)
             for j in range(n)] for i in range(n)]


def _sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _scal(s, A):
    return [[s * a for a in r] for r in A]


def _comm(A, B):
    return _sub(_matmul(A, B), _matmul(B, A))


def leaf_matrices(m):
    """Matrices of the Bott connection and of omega along each leaf vector,
    acting on column vectors of F-perp coefficients."""
    p, q = m.p, m.q
    B = bott_connection(m)
    W = omega_tensor(m)
    # (Bmat_i)[v][u] = <bott_{f_i} h_u, h_v>
    Bm = [[[B[i][u][v] for u in range(q)] for v in range(q)] for i in range(p)]
    Wm = [[[W[i][u][v] for u in range(q)] for v in range(q)] for i in range(p)]
    return Bm, Wm


def flatness_and_omega_identities(m):
    rep = Report()
    p = m.p
    Bm, Wm = leaf_matrices(m)
    c = m.c

    def along(M, i, j):  # M([f_i, f_j]) using integrability of F
        out = _scal(ZERO, M[0]) if M else []
        for k in range(p):
            if c[i][j][k]:
                out = _add(out, _scal(as_exact(c[i][j][k]), M[k]))
        return out

    flat, dom, unit = [], [], []
    for i, j in itertools.combinations(range(p), 2):
        curv = _sub(_comm(Bm[i], Bm[j]), along(Bm, i, j))
        wedge = _comm(Wm[i], Wm[j])
        cov = _sub(_sub(_comm(Bm[i], Wm[j]), _comm(Bm[j], Wm[i])), along(Wm, i, j))
        Ui = _add(Bm[i], _scal(HALF, Wm[i]))
        Uj = _add(Bm[j], _scal(HALF, Wm[j]))
        ucurv = _sub(_comm(Ui, Uj), _add(along(Bm, i, j), _scal(HALF, along(Wm, i, j))))
        q = m.q
        for a in range(q):
            for b in range(q):
                flat.append(((i, j, p + a, p + b), curv[a][b], 0))
                dom.append(((i, j, p + a, p + b), cov[a][b], -wedge[a][b]))
                unit.append(((i, j, p + a, p + b), ucurv[a][b], -wedge[a][b] / 4))
    _compare(rep, "flatness", "bott_flat", "1.9", m, flat)
    _compare(rep, "flatness", "bott_derivative_of_omega", "2.36", m, dom,
             detail="nabla_dot omega = -[omega, omega] (composition)")
    _compare(rep, "flatness", "unitary_curvature", "2.25", m, unit,
             detail="(nabla_dot + omega/2)^2 = -(1/4)[omega, omega]")
    return rep


# --------------------------------------------------------------------------

def verify_frame_suite(m, printed=True):
    rep = Report()
    rep.extend(verify_connection_table(m))
    rep.extend(verify_rescaling_laws(m))
    rep.extend(verify_omega(m))
    rep.extend(adiabatic_limit_check(m))
    rep.extend(verify_s_tensor(m))
    rep.extend(verify_curvature_expansion(m, printed=printed))
    rep.extend(flatness_and_omega_identities(m))
    return rep
