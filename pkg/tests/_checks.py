"""Exhaustive property checks shared by the property suite and the
acceptance run.  Each returns a list of counterexamples (empty on success)."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import List

from chiang_ogw.analysis import orientation_flip, pr_shift, spin_flip
from chiang_ogw.open_gw import OpenGW, OpenKey


def keys_up_to(beta_max: int):
    for beta in range(1, beta_max + 1):
        for l3 in range(beta // 2 + 1):
            for l2 in range(beta - 2 * l3 + 1):
                yield OpenKey(beta, beta - l2 - 2 * l3, l2, l3)


def flip_involutions(tables) -> List[str]:
    bad = []
    for t in tables:
        if orientation_flip(orientation_flip(t)).rows != t.rows:
            bad.append(f"orientation flip not an involution on {t.kind}")
        if spin_flip(spin_flip(t)).rows != t.rows:
            bad.append(f"spin flip not an involution on {t.kind}")
        if orientation_flip(spin_flip(t)).rows != spin_flip(orientation_flip(t)).rows:
            bad.append(f"flips do not commute on {t.kind}")
    return bad


def pr_shift_inverse(table, closed, ps) -> List[str]:
    return [f"p={p}" for p in ps if pr_shift(pr_shift(table, p, closed), -p, closed).rows != table.rows]


def wall_crossing(engine: OpenGW, beta_max: int) -> List[str]:
    """Trading a boundary point for an interior Gamma_diamond flips the sign."""
    bad = []
    for key in keys_up_to(beta_max):
        for moved in range(key.k + 1):
            raw = (0, 0, key.l2, key.l3, moved)
            got = engine.value(key.beta, key.k - moved, raw)
            if got != (-1) ** moved * engine.invariant(key):
                bad.append(f"{tuple(key)} with {moved} moved")
    return bad


def divisor_linearity(engine: OpenGW, beta_max: int) -> List[str]:
    bad = []
    for key in keys_up_to(beta_max):
        base = engine.invariant(key)
        for c1 in range(1, 4):
            got = engine.value(key.beta, key.k, (0, c1, key.l2, key.l3, 0))
            if got != Fraction(key.beta, 4) ** c1 * base:
                bad.append(f"{tuple(key)} c1={c1}")
    return bad


def cross_recursion(engine: OpenGW, beta_max: int) -> List[str]:
    """Every applicable recursion reproduces the stored value."""
    bad = []
    for key in keys_up_to(beta_max):
        v = engine.invariant(key)
        if key.k >= 2 and engine.recursion_b(key) != v:
            bad.append(f"(b) at {tuple(key)}")
        if key.l >= 2 and engine.recursion_c(key) != v:
            bad.append(f"(c) at {tuple(key)}")
        if key.k >= 1 and key.l >= 1 and engine.recursion_a(key) != v:
            bad.append(f"(a) at {tuple(key)}")
    return bad


def cache_determinism(closed, reference: OpenGW, beta_max: int, seed: int) -> List[str]:
    keys = list(keys_up_to(beta_max))
    random.Random(seed).shuffle(keys)
    fresh = OpenGW(closed)
    for key in keys:
        fresh.invariant(key)
    ref = {k: reference.invariant(k) for k in keys}
    return [str(tuple(k)) for k in keys if fresh.invariant(k) != ref[k]]
