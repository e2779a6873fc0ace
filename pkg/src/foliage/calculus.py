"""Algebra of left-invariant vector fields on a frame model.

Vectors are tuples of :class:`ExactScalar` coefficients in the unscaled frame
``e_1..e_n``.  Every left-invariant field has constant coefficients, so
directional derivatives of inner products vanish and covariant derivatives
are bilinear in the coefficients.
"""

from __future__ import annotations

from .exact import ONE, ZERO, as_exact
from .frames import frame_christoffel, koszul_connection, unit_connection


class FrameCalculus:
    def __init__(self, m):
        self.m = m
        self.n, self.p = m.n, m.p
        n = self.n
        self.c = [[[as_exact(m.c[i][j][k]) for k in range(n)] for j in range(n)]
                  for i in range(n)]
        self.A1 = frame_christoffel(unit_connection(m))
        self.Aeps = frame_christoffel(koszul_connection(m))

    # basic constructors -------------------------------------------------------
    def basis(self, a):
        return tuple(ONE if k == a else ZERO for k in range(self.n))

    def vec(self, coeffs):
        return tuple(as_exact(x) for x in coeffs)

    def zero(self):
        return (ZERO,) * self.n

    # linear structure ---------------------------------------------------------
    @staticmethod
    def add(*vs):
        out = list(vs[0])
        for v in vs[1:]:
            out = [a + b for a, b in zip(out, v)]
        return tuple(out)

    @staticmethod
    def scale(s, v):
        s = as_exact(s)
        return tuple(s * x for x in v)

    def p_(self, v):
        return tuple(x if k < self.p else ZERO for k, x in enumerate(v))

    def pperp(self, v):
        return tuple(x if k >= self.p else ZERO for k, x in enumerate(v))

    def inner(self, u, v):
        """``g = g^TM`` at ``eps = 1``."""
        s = ZERO
        for a, b in zip(u, v):
            if a and b:
                s = s + a * b
        return s

    def _bilinear(self, table, u, v):
        n = self.n
        out = [ZERO] * n
        for a in range(n):
            if not u[a]:
                continue
            for b in range(n):
                if not v[b]:
                    continue
                w = u[a] * v[b]
                row = table[a][b]
                for k in range(n):
                    if row[k]:
                        out[k] = out[k] + w * row[k]
        return tuple(out)

    def bracket(self, u, v):
        return self._bilinear(self.c, u, v)

    def nabla(self, u, v):
        """Levi-Civita ``nabla_u v`` of ``g^TM``."""
        return self._bilinear(self.A1, u, v)

    def nabla_eps(self, u, v):
        """Levi-Civita ``nabla_u v`` of ``g_eps = g^F + g^Fperp / eps``."""
        return self._bilinear(self.Aeps, u, v)

    def curvature_eps(self, x, y, z):
        """``R^eps(x, y) z``."""
        ne = self.nabla_eps
        return self.add(ne(x, ne(y, z)), self.scale(-1, ne(y, ne(x, z))),
                        self.scale(-1, ne(self.bracket(x, y), z)))

    def nabla_perp(self, u, v):
        """``nabla^{F-perp} = p_perp nabla p_perp`` at ``eps = 1``."""
        return self.pperp(self.nabla(u, self.pperp(v)))

    def nabla_leaf(self, u, v):
        """``nabla^F = p nabla p`` at ``eps = 1``."""
        return self.p_(self.nabla(u, self.p_(v)))

    def curvature_perp(self, x, y, z):
        npp = self.nabla_perp
        return self.add(npp(x, npp(y, z)), self.scale(-1, npp(y, npp(x, z))),
                        self.scale(-1, npp(self.bracket(x, y), z)))

    def curvature_leaf(self, x, y, z):
        nl = self.nabla_leaf
        return self.add(nl(x, nl(y, z)), self.scale(-1, nl(y, nl(x, z))),
                        self.scale(-1, nl(self.bracket(x, y), z)))

    def omega(self, x, u, v):
        """``omega(x)(u, v) = -<nabla_u v + nabla_v u, x>``."""
        return -self.inner(self.add(self.nabla(u, v), self.nabla(v, u)), x)
