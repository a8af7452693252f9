"""Axiom-level property suite; runs on its own with
``pytest tests/test_properties.py``."""
from __future__ import annotations

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from chiang_ogw.analysis import orientation_flip, spin_flip

import _checks


def test_flip_involutions(boundary32, interior8):
    assert _checks.flip_involutions([boundary32, interior8]) == []


def test_pr_shift_additive(interior8, closed):
    assert _checks.pr_shift_inverse(interior8, closed, [Fraction(-1, 4), Fraction(3), Fraction(-11, 32)]) == []


def test_wall_crossing_round_trip(engine):
    assert _checks.wall_crossing(engine, 8) == []


def test_divisor_linearity(engine):
    assert _checks.divisor_linearity(engine, 8) == []


def test_cross_recursion_b_c(engine):
    assert _checks.cross_recursion(engine, 8) == []


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32))
def test_cache_determinism(closed, engine, seed):
    assert _checks.cache_determinism(closed, engine, 8, seed) == []


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 32))
def test_flip_signs_pointwise(boundary32, beta):
    row_val = boundary32.get(beta, beta, 0, 0)
    assert orientation_flip(boundary32).get(beta, beta, 0, 0) == (-1) ** (beta + 1) * row_val
    assert spin_flip(boundary32).get(beta, beta, 0, 0) == (-1) ** beta * row_val
