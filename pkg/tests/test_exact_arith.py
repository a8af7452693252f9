from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chiang_ogw.exact_arith import (
    NovikovSeries,
    SingularSystemError,
    as_rational,
    denominator_factorization,
    factor_integer,
    format_rational,
    is_power_of_four_denominator,
    is_power_of_two_denominator,
    parse_rational,
    solve_exact,
)

rationals = st.fractions(max_denominator=10**6).filter(lambda r: abs(r.numerator) < 10**12)
series = st.dictionaries(st.integers(0, 12), rationals, max_size=6).map(NovikovSeries)


def test_format_examples():
    assert format_rational(Fraction(-35, 64)) == "-35/64"
    assert format_rational(Fraction(-4860)) == "-4860"
    assert format_rational(Fraction(0)) == "0"


def test_parse_rejects_decimals_and_garbage():
    for bad in ("0.25", "1e3", "", "1/", "/2", "a/b", "1//2"):
        with pytest.raises(ValueError):
            parse_rational(bad)
    with pytest.raises(ZeroDivisionError):
        parse_rational("1/0")
    assert parse_rational("−3/4") == Fraction(-3, 4)
    assert parse_rational("+6/8") == Fraction(3, 4)


@given(rationals)
def test_format_parse_round_trip(r):
    text = format_rational(r)
    assert parse_rational(text) == r
    assert format_rational(parse_rational(text)) == text


def test_as_rational_rejects_floats_and_bools():
    with pytest.raises(TypeError):
        as_rational(0.25)
    with pytest.raises(TypeError):
        as_rational(True)


@given(st.integers(1, 10**12))
def test_factorization_round_trip(n):
    factors, cofactor = factor_integer(n)
    prod = cofactor
    for p, e in factors.items():
        prod *= p**e
    assert prod == n


def test_factorization_examples():
    assert denominator_factorization(Fraction(1, 268435456)) == {2: 28}
    assert denominator_factorization(Fraction(3, 7 * 1024)) == {2: 10, 7: 1}
    assert denominator_factorization(Fraction(5)) == {}
    big_prime = 2**61 - 1
    assert denominator_factorization(Fraction(1, 4 * big_prime)) == {2: 2, big_prime: 1}


def test_power_of_two_and_four():
    assert is_power_of_four_denominator(Fraction(-105, 256))
    assert is_power_of_two_denominator(Fraction(3, 8))
    assert not is_power_of_four_denominator(Fraction(3, 8))
    assert not is_power_of_two_denominator(Fraction(1, 7))
    assert is_power_of_four_denominator(Fraction(3))


def _poly_mul(a, b):
    out = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            out[m1 + m2] = out.get(m1 + m2, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


@given(series, series)
def test_series_multiplication_matches_convolution(a, b):
    assert (a * b).terms == _poly_mul(a.terms, b.terms)


@given(series, series, series)
def test_series_ring_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a - a == NovikovSeries()
    assert a * b == b * a


def test_series_drops_zeros_and_rejects_negative_exponents():
    s = NovikovSeries({0: 0, 3: Fraction(1, 16)})
    assert s.terms == {3: Fraction(1, 16)}
    assert NovikovSeries({1: 1}) - NovikovSeries({1: 1}) == NovikovSeries()
    with pytest.raises(ValueError):
        NovikovSeries({-1: 1})
    assert s.shift(2).coefficient(5) == Fraction(1, 16)
    assert hash(s) == hash(NovikovSeries({3: "1/16"}))


def test_solve_exact_overdetermined():
    rows = [[1, 1, 3], [1, -1, 1], [2, 2, 6]]
    assert solve_exact(rows, 2) == [2, 1]


def test_solve_exact_detects_singular_and_inconsistent():
    with pytest.raises(SingularSystemError):
        solve_exact([[1, 1, 1], [2, 2, 2]], 2)
    with pytest.raises(SingularSystemError):
        solve_exact([[1, 0, 1], [0, 1, 1], [1, 1, 3]], 2)


@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=3, max_size=3),
       st.lists(rationals, min_size=3, max_size=3))
def test_solve_exact_recovers_solution(a, x):
    det = (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
           - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
           + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
    rows = [r + [sum(Fraction(c) * xi for c, xi in zip(r, x))] for r in a]
    if det == 0:
        return
    assert solve_exact(rows, 3) == x
