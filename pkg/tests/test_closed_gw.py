from __future__ import annotations

from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chiang_ogw.closed_gw import ClosedGW, ClosedKey, closed_zero, inverse_metric, metric, reduce_insertions

from closed_oracle import reconstruct

# produced by closed_oracle.reconstruct(3) and frozen
ORACLE_LINES_1 = 2
ORACLE_LINES_2 = 92
ORACLE_LINES_3 = 80160


def test_classical_products():
    assert closed_zero(0, 1, 2) == 1
    assert closed_zero(1, 1, 1) == 1
    assert closed_zero(0, 0, 2) == 0
    assert all(metric(i, 3 - i) == 1 for i in range(4))
    assert all(inverse_metric(i, j) == (i + j == 3) for i in range(4) for j in range(4))
    with pytest.raises(ValueError):
        closed_zero(4, 0, 0)


def test_seed_and_lines(closed):
    assert closed.gw(1, [3, 3]) == 1
    assert closed.gw(1, [2, 2, 3]) == 1
    assert closed.reduced((1, 4, 0)) == ORACLE_LINES_1
    assert closed.reduced((2, 8, 0)) == ORACLE_LINES_2
    assert closed.reduced((3, 12, 0)) == ORACLE_LINES_3


def test_matches_independent_oracle(closed):
    oracle = reconstruct(3)
    for (d, a, b), value in oracle.items():
        assert closed.reduced(ClosedKey(d, a, b)) == value


def test_axioms():
    assert reduce_insertions(1, 1, 0, 0, 2) == (0, None)  # fundamental class
    assert reduce_insertions(2, 0, 3, 8, 0) == (8, ClosedKey(2, 8, 0))  # divisor d^3
    assert reduce_insertions(1, 0, 0, 3, 0) == (0, None)  # degree
    assert reduce_insertions(0, 0, 1, 1, 0) == (0, None)  # two points at d = 0


def test_divisor_consistency(closed):
    for d in (1, 2):
        for b in range(2 * d + 1):
            a = 4 * d - 2 * b
            base = closed.gw_counts(d, 0, 0, a, b)
            for n1 in range(3):
                assert closed.gw_counts(d, 0, n1, a, b) == d**n1 * base


def test_gw_rejects_bad_index(closed):
    with pytest.raises(ValueError):
        closed.gw(1, [5])
    with pytest.raises(ValueError):
        closed.reduced((1, 3, 0))


def test_wdvv_residuals_vanish_to_degree_three(closed):
    for d in range(4):
        for quad in product(range(4), repeat=4):
            target = 4 * d + 3 - sum(quad)
            for b in range(max(target, -1) // 2 + 1):
                a = target - 2 * b
                assert closed.wdvv_residual(*quad, d, a, b) == 0


def test_integrality_and_positivity(closed):
    for d in range(1, 5):
        for b in range(2 * d + 1):
            v = closed.reduced((d, 4 * d - 2 * b, b))
            assert v.denominator == 1 and v >= 0


def test_records_round_trip(closed):
    closed.reduced((3, 12, 0))
    fresh = ClosedGW()
    fresh.preload(closed.records())
    assert fresh.records() == closed.records()
    with pytest.raises(ValueError):
        fresh.preload([(ClosedKey(1, 4, 0), Fraction(3))])


@settings(max_examples=30, deadline=None)
@given(st.permutations([1, 2, 3, 3]), st.integers(1, 3))
def test_wdvv_residual_symmetric_orderings(closed, quad, d):
    target = 4 * d + 3 - sum(quad)
    for b in range(target // 2 + 1):
        assert closed.wdvv_residual(*quad, d, target - 2 * b, b) == 0
