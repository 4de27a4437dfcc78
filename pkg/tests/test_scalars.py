"""Exact surd arithmetic and the numeric context."""

from __future__ import annotations

import random
from fractions import Fraction

import mpmath as mp
import pytest

from excision.errors import DomainError
from excision.scalars import (
    CompensatedSum,
    Context,
    Surd,
    exact_sqrt,
    fraction_to_mpf,
    parse_scalar,
    scalar_str,
)


def test_exact_sqrt_perfect_squares():
    assert exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert exact_sqrt(Fraction(0)) == 0
    assert exact_sqrt(Fraction(144)) == 12
    assert exact_sqrt(Fraction(2)) is None
    assert exact_sqrt(Fraction(1, 3)) is None
    with pytest.raises(DomainError):
        exact_sqrt(Fraction(-1))


def test_surd_collapses_perfect_squares():
    s = Surd(1, 2, Fraction(9, 4))
    assert s.is_rational and s.rational_value() == 4
    assert Surd.sqrt(5).q == 5


def test_surd_arithmetic_same_radicand():
    r5 = Surd.sqrt(5)
    v = (r5 + 1) * (r5 - 1)
    assert v.is_rational and v.rational_value() == 4
    w = (3 - 2 * Surd.sqrt(2)) * (3 + 2 * Surd.sqrt(2))
    assert w.rational_value() == 1
    assert (1 / r5) * r5 == 1


def test_surd_mixed_radicand_raises_on_add():
    with pytest.raises(TypeError):
        Surd.sqrt(2) + Surd.sqrt(3)


def test_surd_exact_comparisons_across_radicands():
    # sqrt(2) + sqrt(3) vs sqrt(10): 2 + 3 + 2 sqrt 6 < 10
    a = Surd.sqrt(2) + 1
    b = Surd.sqrt(3)
    assert b < a
    assert Surd.sqrt(8) == 2 * Surd.sqrt(2)
    assert Surd(0, 1, 2) < Surd(0, 1, 3)
    assert Surd(10, -1, 2) > Surd(8, 0, 0)
    assert Surd(1, 1, 2) < Fraction(5, 2)
    assert not Surd(1, 1, 2) < Fraction(24, 10)


def test_surd_comparison_randomized_against_float():
    rng = random.Random(7)
    for _ in range(2000):
        r1, s1 = Fraction(rng.randint(-8, 8)), Fraction(rng.randint(-4, 4))
        r2, s2 = Fraction(rng.randint(-8, 8)), Fraction(rng.randint(-4, 4))
        q1, q2 = Fraction(rng.randint(0, 30)), Fraction(rng.randint(0, 30))
        u = Surd(r1, s1, q1)
        v = Surd(r2, s2, q2)
        uf = float(r1) + float(s1) * float(q1) ** 0.5
        vf = float(r2) + float(s2) * float(q2) ** 0.5
        if abs(uf - vf) > 1e-9:
            assert (u < v) == (uf < vf)
            assert (u == v) is False


def test_surd_to_mpf_precision():
    val = Surd(1, 1, 2).to_mpf(256)
    with mp.workprec(300):
        ref = 1 + mp.sqrt(mp.mpf(2))
        assert abs(val - ref) < mp.mpf(2) ** -250


def test_context_scalar_and_sqrt():
    exact = Context(exact=True, prec=256)
    assert exact.scalar("9/4") == Fraction(9, 4)
    assert exact.sqrt(Fraction(9, 4)) == Fraction(3, 2)
    root = exact.sqrt(5)
    assert isinstance(root, Surd)
    fl = Context(exact=False, prec=128)
    v = fl.sqrt(2)
    assert isinstance(v, mp.mpf)


def test_compensated_sum_recovers_cancellation():
    acc = CompensatedSum(64)
    big = mp.mpf(10) ** 12
    for _ in range(10):
        acc.add(big)
        acc.add(mp.mpf("0.1"))
        acc.add(-big)
    with mp.workprec(64):
        assert abs(acc.value() - 1) < mp.mpf(2) ** -40


def test_scalar_str_roundtrip():
    exact = Context(exact=True, prec=256)
    assert scalar_str(Fraction(5)) == "5"
    assert scalar_str(Fraction(9, 4)) == "9/4"
    assert parse_scalar("9/4", exact) == Fraction(9, 4)
    fl = Context(exact=False, prec=256)
    with fl.workprec():
        x = mp.mpf(1) / 3
    s = scalar_str(x, 256)
    y = parse_scalar(s, fl)
    with fl.workprec():
        assert abs(x - y) <= mp.mpf(2) ** -250


def test_fraction_to_mpf_huge_values():
    big = Fraction(3 ** 4000, 2 ** 5000)
    v = fraction_to_mpf(big, 128)
    with mp.workprec(160):
        ref = mp.mpf(3) ** 4000 / mp.mpf(2) ** 5000
        assert abs(v / ref - 1) < mp.mpf(2) ** -120
