from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chiang_ogw.exact_arith import NovikovSeries
from chiang_ogw.open_gw import DIAMOND
from chiang_ogw.rqc import BASIS, QHElement, QuantumRing


@pytest.fixture(scope="module")
def ring(engine):
    return QuantumRing(engine)


def Y(exp, coeff):
    return QHElement.q(exp, coeff, DIAMOND)


def test_worked_products(ring):
    e = QHElement.basis
    assert ring.multiply(e(1), e(1)) == e(2)
    assert ring.multiply(e(1), e(2)) == e(3) + Y(1, Fraction(1, 16))
    assert ring.multiply(e(DIAMOND), e(DIAMOND)) == Y(2, Fraction(5, 4))
    assert ring.multiply(e(1), e(DIAMOND)) == Y(1, Fraction(-3, 4))
    for j in BASIS:
        assert ring.multiply(e(0), e(j)) == e(j)


def test_presentation(ring):
    report = ring.verify_presentation()
    assert report.passed, report.to_text()
    assert len(report.results) == 5


def test_associativity(ring):
    report = ring.associativity_check()
    assert report.passed, report.to_text(only_failures=True)
    assert len(report.results) == 125 + 25


def test_grading(ring):
    assert ring.grading_violations() == []


def test_structure_constants_round_trip(ring, engine):
    for u in BASIS:
        for v in BASIS:
            for beta in range(6):
                assert ring.open_coefficient(u, v, beta) == engine.ogw(beta, 0, u, v)


def test_element_invariants():
    z = QHElement({0: NovikovSeries(), 1: 0})
    assert z.is_zero() and str(z) == "0"
    with pytest.raises(ValueError):
        QHElement({7: 1})
    x = QHElement.q(1, Fraction(1, 16), DIAMOND)
    assert str(x) == "1/16 · q^{1/4} · Γ_⋄"
    assert json.loads(json.dumps(x.to_json())) == [{"basis": "Γ_⋄", "exponent": 1, "value": "1/16"}]


elements = st.dictionaries(
    st.sampled_from(BASIS),
    st.dictionaries(st.integers(0, 4), st.fractions(max_denominator=16), max_size=2).map(NovikovSeries),
    max_size=3,
).map(QHElement)


@given(elements, elements, elements)
def test_bilinearity_and_commutativity(ring, x, y, z):
    assert ring.multiply(x + y, z) == ring.multiply(x, z) + ring.multiply(y, z)
    assert ring.multiply(x, y) == ring.multiply(y, x)
