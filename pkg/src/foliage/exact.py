"""Exact rational functions in one indeterminate ``t``.

``t`` plays the role of the square root of the adiabatic parameter, so
``eps = t**2``.  Polynomials are tuples of Python ints, lowest degree first,
with no trailing zeros; the zero polynomial is ``()``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

Poly = tuple


class PoleError(ZeroDivisionError):
    """Raised when evaluating at a root of the denominator."""


@dataclass(frozen=True)
class Diverges:
    """Marker returned by :func:`limit_at_zero` for a pole at ``t = 0``."""

    order: int


# --------------------------------------------------------------------------
# integer polynomial helpers

def _trim(a):
    n = len(a)
    while n and a[n - 1] == 0:
        n -= 1
    return tuple(a[:n])


def _add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def _neg(a):
    return tuple(-c for c in a)


def _mul(a, b):
    if not a or not b:
        return ()
    if len(a) == 1:
        c = a[0]
        return tuple(c * x for x in b)
    if len(b) == 1:
        c = b[0]
        return tuple(c * x for x in a)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def _scale(a, c):
    return tuple(c * x for x in a)


def _valuation(a):
    for i, c in enumerate(a):
        if c:
            return i
    raise ValueError("valuation of the zero polynomial")


def _content(a):
    return math.gcd(*a) if a else 0


def _exact_div(a, b):
    """Quotient of ``a`` by ``b`` over Z[t]; ``b`` must divide ``a``."""
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c:
            qc, r = divmod(c, lb)
            if r:
                raise ArithmeticError("inexact polynomial division")
            q[k - db] = qc
            for j, y in enumerate(b):
                a[k - db + j] -= qc * y
    if any(a):
        raise ArithmeticError("inexact polynomial division")
    return _trim(q)


def _prem(a, b):
    """Pseudo-remainder of a by b."""
    r = list(a)
    db, lb = len(b) - 1, b[-1]
    while len(r) - 1 >= db and r:
        c = r[-1]
        shift = len(r) - 1 - db
        r = [lb * x for x in r]
        for j, y in enumerate(b):
            r[shift + j] -= c * y
        r = list(_trim(r))
    return tuple(r)


def _primitive(a):
    c = _content(a)
    if c == 0:
        return ()
    if a[-1] < 0:
        c = -c
    return tuple(x // c for x in a)


def poly_gcd(a, b):
    """Primitive gcd over Z[t] with positive leading coefficient."""
    a, b = _primitive(a), _primitive(b)
    if not a:
        return b
    if not b:
        return a
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = _prem(a, b)
        a, b = b, _primitive(r)
    return _primitive(a)


def _normalize(num, den):
    num, den = _trim(num), _trim(den)
    if not den:
        raise ZeroDivisionError("zero denominator")
    if not num:
        return (), (1,)
    k = min(_valuation(num), _valuation(den))
    if k:
        num, den = num[k:], den[k:]
    if len(den) > 1 and len(num) > 1:
        # monomial denominators (the common case) share no nonunit factor
        if any(den[:-1]):
            g = poly_gcd(num, den)
            if len(g) > 1:
                num, den = _exact_div(num, g), _exact_div(den, g)
    c = math.gcd(_content(num), _content(den))
    if den[-1] < 0:
        c = -c
    if c != 1:
        num = tuple(x // c for x in num)
        den = tuple(x // c for x in den)
    return num, den


# --------------------------------------------------------------------------

class ExactScalar:
    """Reduced quotient ``numerator(t) / denominator(t)`` over the integers.

    Instances are immutable and hashable.  Arithmetic with ``int`` and
    ``fractions.Fraction`` operands is supported.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=(), den=(1,), *, _reduced=False):
        if not _reduced:
            num, den = _normalize(tuple(num), tuple(den))
        self.num = num
        self.den = den
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def coerce(cls, x):
        if isinstance(x, ExactScalar):
            return x
        if isinstance(x, int):
            return cls((x,) if x else (), (1,), _reduced=True)
        if isinstance(x, Rational):
            x = Fraction(x)
            return cls((x.numerator,) if x else (), (x.denominator,), _reduced=True)
        raise TypeError(f"cannot coerce {type(x).__name__} to ExactScalar")

    @classmethod
    def monomial(cls, coeff, power):
        """``coeff * t**power`` for integer (possibly negative) ``power``."""
        coeff = Fraction(coeff)
        if coeff == 0:
            return cls()
        if power >= 0:
            return cls((0,) * power + (coeff.numerator,), (coeff.denominator,))
        return cls((coeff.numerator,), (0,) * (-power) + (coeff.denominator,))

    # predicates ----------------------------------------------------------
    def is_zero(self):
        return not self.num

    def is_constant(self):
        return len(self.num) <= 1 and len(self.den) == 1

    def is_laurent(self):
        """True when the denominator is a monomial ``c * t**k``."""
        return not any(self.den[:-1])

    def valuation(self):
        """Order of vanishing at ``t = 0`` (negative for a pole)."""
        if not self.num:
            return math.inf
        return _valuation(self.num) - _valuation(self.den)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return Fraction(self.num[0] if self.num else 0, self.den[0])

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        if not o.num:
            return self
        if not self.num:
            return o
        if self.den == o.den:
            return ExactScalar(_add(self.num, o.num), self.den)
        return ExactScalar(
            _add(_mul(self.num, o.den), _mul(o.num, self.den)),
            _mul(self.den, o.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(_neg(self.num), self.den, _reduced=True)

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        if not self.num or not o.num:
            return ExactScalar((), (1,), _reduced=True)
        return ExactScalar(_mul(self.num, o.num), _mul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        if not o.num:
            raise ZeroDivisionError("division by the zero rational function")
        return ExactScalar(_mul(self.num, o.den), _mul(self.den, o.num))

    def __rtruediv__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return o / self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return ExactScalar.coerce(1) / self ** (-k)
        out = ExactScalar.coerce(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # comparison ----------------------------------------------------------
    def __eq__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    # evaluation ------------------------------------------------------------
    def evaluate(self, t0):
        return evaluate(self, t0)

    def __call__(self, t0):
        return evaluate(self, t0)

    def __float__(self):
        return float(self.constant_value())

    # rendering -------------------------------------------------------------
    def __str__(self):
        return f"({render_poly(self.num)})/({render_poly(self.den)})"

    def __repr__(self):
        return f"ExactScalar({self})"


T = ExactScalar((0, 1), (1,), _reduced=True)
ZERO = ExactScalar((), (1,), _reduced=True)
ONE = ExactScalar((1,), (1,), _reduced=True)


def as_exact(x):
    return ExactScalar.coerce(x)


def _horner(a, x):
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def evaluate(s, t0):
    """Exact value of ``s`` at the rational point ``t0``."""
    s = ExactScalar.coerce(s)
    t0 = Fraction(t0)
    d = _horner(s.den, t0)
    if d == 0:
        raise PoleError(f"{s} has a pole at t = {t0}")
    return _horner(s.num, t0) / d


def limit_at_zero(s):
    """Value at ``t = 0`` as a constant ExactScalar, or ``Diverges(order)``."""
    s = ExactScalar.coerce(s)
    if not s.num:
        return ZERO
    v = s.valuation()
    if v < 0:
        return Diverges(-v)
    if v > 0:
        return ZERO
    return ExactScalar.coerce(Fraction(s.num[0], s.den[0]))


# --------------------------------------------------------------------------
# canonical string form

def render_poly(a):
    if not a:
        return "0"
    terms = []
    for k in range(len(a) - 1, -1, -1):
        c = a[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        m = abs(c)
        if k == 0:
            body = str(m)
        else:
            mono = "t" if k == 1 else f"t^{k}"
            body = mono if m == 1 else f"{m}*{mono}"
        terms.append((sign, body))
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


_TERM = re.compile(r"([+-]?)\s*(\d+)?\s*\*?\s*(t(?:\^(\d+))?)?")


def _parse_poly(text):
    text = text.replace(" ", "")
    if text in ("", "0"):
        return ()
    coeffs = {}
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial {text!r}")
        sign, c, mono, e = m.groups()
        if c is None and mono is None:
            raise ValueError(f"cannot parse polynomial {text!r}")
        val = int(c) if c is not None else 1
        if sign == "-":
            val = -val
        k = 0 if mono is None else (int(e) if e else 1)
        coeffs[k] = coeffs.get(k, 0) + val
        pos = m.end()
    deg = max(coeffs)
    return _trim([coeffs.get(k, 0) for k in range(deg + 1)])


def parse_exact(text):
    """Inverse of ``str(ExactScalar)``."""
    m = re.fullmatch(r"\s*\((.*)\)\s*/\s*\((.*)\)\s*", text)
    if not m:
        return ExactScalar(_parse_poly(text), (1,))
    return ExactScalar(_parse_poly(m.group(1)), _parse_poly(m.group(2)))
