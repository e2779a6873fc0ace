import random
from fractions import Fraction

import pytest

from foliage.exact import (ONE, T, ZERO, Diverges, ExactScalar, PoleError, evaluate,
                           limit_at_zero, parse_exact)


def rand_scalar(rng):
    num = [rng.randint(-4, 4) for _ in range(rng.randint(0, 3))]
    den = [rng.randint(-3, 3) for _ in range(rng.randint(1, 3))]
    if not any(den):
        den = [1]
    return ExactScalar(num, den)


def test_reduced_form():
    s = ExactScalar((0, 2), (0, 4))  # 2t / 4t
    assert s == ExactScalar((1,), (2,))
    neg = ExactScalar((1,), (-2,))
    assert neg.den[-1] > 0 and neg == ExactScalar((-1,), (2,))


def test_zero_denominator_rejected():
    with pytest.raises(ZeroDivisionError):
        ExactScalar((1,), ())
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_limit_examples():
    assert limit_at_zero(T * T + 1) == ONE
    assert limit_at_zero(T / T) == ONE
    lim = limit_at_zero(1 / (T * T))
    assert isinstance(lim, Diverges) and lim.order == 2


def test_evaluate_examples():
    assert evaluate((1 - T * T) / 2, 1) == 0
    assert evaluate(1 / (1 + T), 1) == Fraction(1, 2)
    assert evaluate(T ** 3, Fraction(1, 2)) == Fraction(1, 8)
    with pytest.raises(PoleError):
        evaluate(1 / (1 - T), 1)


def test_ring_axioms_random():
    rng = random.Random(7)
    for _ in range(200):
        a, b, c = (rand_scalar(rng) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        if b:
            assert (a * b) / b == a


def test_limit_is_additive():
    rng = random.Random(3)
    checked = 0
    for _ in range(200):
        a, b = rand_scalar(rng), rand_scalar(rng)
        la, lb = limit_at_zero(a), limit_at_zero(b)
        if isinstance(la, Diverges) or isinstance(lb, Diverges):
            continue
        assert limit_at_zero(a + b) == la + lb
        checked += 1
    assert checked > 50


def test_render_roundtrip():
    rng = random.Random(11)
    for _ in range(50):
        s = rand_scalar(rng)
        assert parse_exact(str(s)) == s


def test_large_integers_are_exact():
    big = ExactScalar((10 ** 30 + 1,), (3,))
    assert (big * 3 - 1) == ExactScalar((10 ** 30,))
