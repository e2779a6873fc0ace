"""Named frame models and randomized generators used by tests and the CLI."""

from __future__ import annotations

import random
from fractions import Fraction

from .frames import LieFrameModel, ModelError


def abelian(p=2, q=2):
    return LieFrameModel.from_brackets(p + q, p, [], name=f"abelian_T{p + q}")


def kodaira_thurston(leaf=(3, 4), split=None):
    """Heisenberg x circle: the single relation ``[e1, e2] = e3``.

    ``leaf`` names the two original basis vectors spanning F.
    """
    name = "kt_F" + "".join(str(x) for x in leaf)
    return LieFrameModel.from_brackets(4, 2, [(1, 2, 3, 1)], leaf=list(leaf),
                                       name=name, split=split)


def filiform4(leaf=(3, 4)):
    """``[e1, e2] = e3``, ``[e1, e3] = e4``."""
    return LieFrameModel.from_brackets(4, 2, [(1, 2, 3, 1), (1, 3, 4, 1)],
                                       leaf=list(leaf), name="filiform4")


def _rand_frac(rng, lo=-3, hi=3, dens=(1, 1, 2)):
    return Fraction(rng.randint(lo, hi), rng.choice(dens))


def _transform(c, P):
    """Structure constants in the basis ``e'_a = sum_b P[b][a] e_b``."""
    n = len(c)
    Pinv = _inverse(P)
    out = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            # [e'_a, e'_b] = sum P[i][a] P[j][b] c[i][j][k] e_k
            vec = [Fraction(0)] * n
            for i in range(n):
                if not P[i][a]:
                    continue
                for j in range(n):
                    if not P[j][b]:
                        continue
                    w = P[i][a] * P[j][b]
                    for k in range(n):
                        if c[i][j][k]:
                            vec[k] += w * c[i][j][k]
            for m in range(n):
                s = sum(Pinv[m][k] * vec[k] for k in range(n) if vec[k])
                out[a][b][m] = s
                out[b][a][m] = -s
    return out


def _inverse(P):
    n = len(P)
    A = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(P)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col])
        A[col], A[piv] = A[piv], A[col]
        f = A[col][col]
        A[col] = [x / f for x in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                g = A[r][col]
                A[r] = [x - g * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


def cayley_orthogonal(rng, k):
    """Random rational orthogonal ``k x k`` matrix ``(I - A)(I + A)^-1``."""
    if k == 1:
        return [[Fraction(rng.choice([1, -1]))]]
    A = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            v = _rand_frac(rng, -2, 2)
            A[i][j], A[j][i] = v, -v
    I = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    ImA = [[I[i][j] - A[i][j] for j in range(k)] for i in range(k)]
    inv = _inverse([[I[i][j] + A[i][j] for j in range(k)] for i in range(k)])
    return [[sum(ImA[i][m] * inv[m][j] for m in range(k)) for j in range(k)]
            for i in range(k)]


def _to_model(c, p, name):
    n = len(c)
    recs = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                if c[i][j][k]:
                    recs.append((i + 1, j + 1, k + 1, c[i][j][k]))
    return LieFrameModel.from_brackets(n, p, recs, name=name)


def random_nilpotent(rng, n, p, name=None):
    """A random 2-step nilpotent algebra with F a subalgebra, seen through a
    random F-preserving change of basis (so the declared metric is generic).
    """
    if isinstance(rng, int):
        rng = random.Random(rng)
    for _ in range(100):
        # centre Z: a random nonempty proper subset; brackets V x V -> Z
        nz = rng.randint(1, n - 2)
        centre = set(rng.sample(range(n), nz))
        leaf = set(range(p))
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
        V = [i for i in range(n) if i not in centre]
        Z = sorted(centre)
        for ai, a in enumerate(V):
            for b in V[ai + 1:]:
                for k in Z:
                    if a in leaf and b in leaf and k not in leaf:
                        continue
                    if rng.random() < 0.6:
                        v = _rand_frac(rng)
                        c[a][b][k] = v
                        c[b][a][k] = -v
        if not any(any(any(r) for r in m) for m in c):
            continue
        # block upper-triangular change of basis keeps span(e_1..e_p)
        P = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            P[i][i] = Fraction(rng.choice([1, 1, 2, -1]))
        for j in range(n):
            for i in range(n):
                if i == j or (j < p and i >= p):
                    continue
                if rng.random() < 0.3:
                    P[i][j] = _rand_frac(rng, -1, 1)
        try:
            _inverse(P)
        except StopIteration:
            continue
        ct = _transform(c, P)
        try:
            return _to_model(ct, p, name or f"nil{n}_{p}")
        except ModelError:  # pragma: no cover - construction keeps invariants
            continue
    raise RuntimeError("could not generate a random nilpotent model")


def random_models(seed, count, dims=((4, 2), (6, 2), (6, 4))):
    rng = random.Random(seed)
    out = []
    for idx in range(count):
        n, p = dims[idx % len(dims)]
        out.append(random_nilpotent(rng, n, p, name=f"rand{idx:03d}_n{n}p{p}"))
    return out


def random_almost_isometric(rng, n=4, p=2, q1=1, name=None):
    """Random model whose complement splits as F1 + F2 with the local
    almost-isometric conditions built in.

    Leaf vectors map F2 into F1 and annihilate F1, which is central, so the
    Bott action is block upper triangular and the Jacobi identity holds by
    construction.  Rational rotations inside F, F1 and F2 then mix the frame.
    """
    if isinstance(rng, int):
        rng = random.Random(rng)
    q = n - p
    q2 = q - q1
    F = list(range(p))
    P1 = list(range(p, p + q1))
    P2 = list(range(p + q1, n))
    for _ in range(200):
        c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]

        def put(a, b, k, v):
            c[a][b][k] += v
            c[b][a][k] -= v

        # [X, U2] in F1 is the off-diagonal block; F1 is central
        for X in F:
            for u in P2:
                for v in P1:
                    if rng.random() < 0.7:
                        put(X, u, v, _rand_frac(rng))
        # transverse brackets into F1 (central) keep the conditions
        for ai, a in enumerate(P2):
            for b in P2[ai + 1:]:
                for v in P1:
                    if rng.random() < 0.5:
                        put(a, b, v, _rand_frac(rng))
        if not any(c[X][u][v] for X in F for u in P2 for v in P1):
            continue
        # rational rotations inside F, F1 and F2 keep the frame orthonormal
        Q = [[Fraction(0)] * n for _ in range(n)]
        for block in (F, P1, P2):
            R = cayley_orthogonal(rng, len(block))
            for bi, i in enumerate(block):
                for bj, j in enumerate(block):
                    Q[i][j] = R[bi][bj]
        c = _transform(c, Q)
        recs = [(i + 1, j + 1, k + 1, c[i][j][k]) for i in range(n)
                for j in range(i + 1, n) for k in range(n) if c[i][j][k]]
        try:
            return LieFrameModel.from_brackets(
                n, p, recs, name=name or f"ai{n}",
                split=([x + 1 for x in P1], [x + 1 for x in P2]))
        except ModelError:
            continue
    raise RuntimeError("could not generate an almost isometric model")
