"""Real trigonometric polynomials on the unit torus and spectral grid tools."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


def _canon(k):
    """Representative of ``{k, -k}`` whose first nonzero entry is positive."""
    for x in k:
        if x:
            return tuple(k) if x > 0 else tuple(-y for y in k)
    return tuple(k)


@dataclass(frozen=True)
class TrigPolyField:
    """``sum_k a_k cos(2 pi k.x) + b_k sin(2 pi k.x)`` on ``R^n / Z^n``.

    ``terms`` maps a frequency vector (canonical sign) to ``(a_k, b_k)``.
    """

    n: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for k, (a, b) in self.terms.items():
            if len(k) != self.n:
                raise ValueError(f"frequency {k} has wrong length for n={self.n}")
            ck = _canon(tuple(int(x) for x in k))
            sign = 1.0 if ck == tuple(k) else -1.0
            a0, b0 = clean.get(ck, (0.0, 0.0))
            if not any(ck):
                b = 0.0  # sin(0) = 0
            clean[ck] = (a0 + float(a), b0 + sign * float(b))
        clean = {k: v for k, v in clean.items() if v[0] or v[1]}
        object.__setattr__(self, "terms", clean)

    # constructors -----------------------------------------------------------
    @classmethod
    def constant(cls, n, value):
        return cls(n, {(0,) * n: (value, 0.0)})

    @classmethod
    def from_records(cls, n, records):
        """``records`` is a list of ``(freq, cos_coeff, sin_coeff)``."""
        terms = {}
        for k, a, b in records:
            ck = _canon(tuple(k))
            sign = 1.0 if ck == tuple(k) else -1.0
            a0, b0 = terms.get(ck, (0.0, 0.0))
            terms[ck] = (a0 + a, b0 + sign * b)
        return cls(n, terms)

    def to_records(self):
        return [[list(k), a, b] for k, (a, b) in sorted(self.terms.items())]

    # algebra ----------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, TrigPolyField):
            other = TrigPolyField.constant(self.n, other)
        terms = dict(self.terms)
        for k, (a, b) in other.terms.items():
            a0, b0 = terms.get(k, (0.0, 0.0))
            terms[k] = (a0 + a, b0 + b)
        return TrigPolyField(self.n, terms)

    __radd__ = __add__

    def scale(self, s):
        return TrigPolyField(self.n, {k: (s * a, s * b) for k, (a, b) in self.terms.items()})

    @property
    def bandwidth(self):
        return max((max(abs(x) for x in k) for k in self.terms), default=0)

    def active_axes(self):
        return {j for k in self.terms for j, x in enumerate(k) if x}

    def is_constant(self):
        return not self.active_axes()

    def derivative(self, axis):
        """Exact partial derivative, again a trigonometric polynomial."""
        out = {}
        for k, (a, b) in self.terms.items():
            w = TWO_PI * k[axis]
            if w:
                out[k] = (w * b, -w * a)
        return TrigPolyField(self.n, out)

    # sampling -----------------------------------------------------------------
    def __call__(self, x):
        """Evaluate at points ``x`` of shape ``(..., n)``."""
        x = np.asarray(x, dtype=float)
        val = np.zeros(x.shape[:-1])
        for k, (a, b) in self.terms.items():
            th = TWO_PI * (x @ np.asarray(k, dtype=float))
            val = val + a * np.cos(th) + b * np.sin(th)
        return val

    def sample(self, shape):
        """Samples on the uniform grid ``x_j = i_j / N_j``; axes with
        ``shape[j] == 1`` are taken at ``x_j = 0`` (use for inactive axes)."""
        axes = [np.arange(N) / N for N in shape]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack(mesh, axis=-1)
        return self(pts)


# ---------------------------------------------------------------------------
# grids

def min_resolution(bandwidth):
    """Smallest admissible points per axis for products of metric entries."""
    return max(4, 4 * bandwidth + 1)


def wavenumbers(N):
    """Angular wavenumbers ``2 pi k`` in FFT order (Nyquist mode kept)."""
    return TWO_PI * np.fft.fftfreq(N, 1.0 / N)


def spectral_derivative(u, axis, order=1):
    """Fourier derivative of periodic samples along ``axis``."""
    N = u.shape[axis]
    if N == 1:
        return np.zeros_like(u)
    k = wavenumbers(N)
    shape = [1] * u.ndim
    shape[axis] = N
    mult = ((1j * k) ** order).reshape(shape)
    out = np.fft.ifft(np.fft.fft(u, axis=axis) * mult, axis=axis)
    return out.real if np.isrealobj(u) else out
