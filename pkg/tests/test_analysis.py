from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chiang_ogw.analysis import (
    InvariantTable,
    TableRow,
    boundary_table,
    denominator_audit,
    display_value,
    fixed_display,
    interior_table,
    monotonicity_violations,
    orientation_flip,
    override_check,
    pr_certificate,
    pr_shift,
    scientific_display,
    sign_periodicity,
    spin_flip,
    v_search,
)
from chiang_ogw.open_gw import DivisorZero, OpenGW

SUBSTITUTE_V = Fraction(-46912496118431, 17592186044416)


def test_display_examples(boundary32):
    assert boundary32.records()[6]["display"] == "3.91"
    assert boundary32.records()[11]["display"] == "2261.25"
    assert boundary32.records()[17]["display"] == "7.68·10⁷"
    assert boundary32.records()[7]["display"] == "0"


def test_display_rounding():
    assert fixed_display(Fraction(1, 8)) == "0.12"  # half to even
    assert fixed_display(Fraction(-3, 4)) == "−0.75"
    assert scientific_display(Fraction(13851952)) == "1.38·10⁷"
    assert scientific_display(Fraction(13851952), two_stage=False) == "1.39·10⁷"
    assert scientific_display(Fraction(-99951, 100)) == "−1.00·10³"
    assert scientific_display(Fraction(1, 1000)) == "1.00·10⁻³"
    assert display_value(17, Fraction(0)) == "0"


def test_interior_table_shape(interior8):
    assert len(interior8) == 32
    assert interior8.get(5, 0, 5, 0) == Fraction(427725, 262144)
    assert interior8.get(8, 0, 2, 3) == Fraction(-3, 8)
    assert interior8.get(1, 0, 0, 1) == 0


def test_tables_reject_bad_beta(engine):
    with pytest.raises(ValueError):
        boundary_table(engine, 0)
    with pytest.raises(ValueError):
        interior_table(engine, -1)


def test_table_duplicates_rejected():
    row = TableRow(1, 1, 0, 0, Fraction(3))
    with pytest.raises(ValueError):
        InvariantTable("boundary", (row, row))


def test_json_schema_and_determinism(engine):
    a = boundary_table(engine, 10)
    b = boundary_table(OpenGW(engine.closed), 10)
    assert a.to_json() == b.to_json()
    recs = json.loads(a.to_json())
    assert set(recs[0]) == {"beta", "k", "l2", "l3", "value", "display"}
    assert recs[2]["value"] == "-7/16"


def test_renderers(interior8):
    assert interior8.render("csv").splitlines()[0] == "beta,k,l2,l3,value,display"
    assert len(interior8.render("md").splitlines()) == 34
    assert "427725/262144" in interior8.render("text")
    with pytest.raises(ValueError):
        interior8.render("xml")


def test_denominator_audits(boundary32, interior8):
    b = denominator_audit(boundary32)
    assert b["boundary_power_of_four"] and b["violations"] == []
    i = denominator_audit(interior8)
    assert i["all_power_of_two"] and i["violations"] == []


def test_denominator_audit_lists_odd_primes(closed):
    eng = OpenGW(closed, OpenGW().basics.with_v102(SUBSTITUTE_V))
    report = denominator_audit(boundary_table(eng, 5))
    assert report["violations"] == [
        {"key": [5, 5, 0, 0], "value": report["rows"][4]["value"], "odd_primes": [7], "reason": "odd prime"}]


def test_sign_periodicity(boundary32):
    r = sign_periodicity(boundary32, 24)
    assert r["passed"] and r["skipped"] == [8]
    assert 7 in r["checked"] and 16 in r["checked"]
    with pytest.raises(ValueError):
        sign_periodicity(boundary_table(OpenGW(), 8))


def test_monotonicity(boundary32):
    v = monotonicity_violations(boundary32)
    assert {8, 16, 24, 32} <= set(v)
    assert [b for b in v if b >= 6] == [8, 16, 24, 32]


def test_pr_shift_examples(interior8, closed):
    t = pr_shift(interior8, Fraction(-1, 4), closed)
    assert t.get(4, 0, 0, 2) == 0
    assert t.get(4, 0, 2, 1) == Fraction(-3, 32)
    for old, new in zip(interior8.rows, t.rows):
        if old.beta % 4:
            assert old == new


@settings(max_examples=20, deadline=None)
@given(st.fractions(max_denominator=64))
def test_pr_shift_inverse(interior8, closed, p):
    assert pr_shift(pr_shift(interior8, p, closed), -p, closed).rows == interior8.rows


def test_pr_certificate(engine):
    r = pr_certificate(engine)
    assert [c["p"] for c in r["constraints"]] == ["-1/4", "-11/32"]
    assert r["verdict"] == "inconsistent"


def test_flips(boundary32, interior8):
    assert orientation_flip(boundary32).get(1, 1, 0, 0) == 3
    assert orientation_flip(boundary32).get(2, 2, 0, 0) == Fraction(-5, 4)
    assert spin_flip(interior8).get(1, 0, 1, 0) == Fraction(-1, 4)
    assert spin_flip(interior8).get(2, 0, 2, 0) == Fraction(-35, 64)


def test_override_examples(closed):
    ok = override_check(Fraction(1, 4), 32, closed)
    assert ok["passed"]
    sub = override_check(SUBSTITUTE_V, 4, closed)
    assert sub["passed"] and sub["next_odd_primes"] == [7]
    with pytest.raises(DivisorZero):
        override_check(Fraction(-8, 3), 2, closed)
    with pytest.raises(ValueError):
        override_check(Fraction(1), 0, closed)


def test_v_search(closed):
    assert v_search(0, 0, 1, closed) == []
    tiny = v_search(2, 1, 1, closed)
    assert Fraction(1, 2) in tiny and Fraction(1, 4) not in tiny
    assert v_search(5 * 10**13, 44, 4, closed, mode="rigid") == [SUBSTITUTE_V]
    assert SUBSTITUTE_V in v_search(5 * 10**13, 44, 4, closed)
    with pytest.raises(ValueError):
        v_search(1, 1, 1, closed, mode="other")
