"""Genus-zero closed Gromov-Witten invariants of CP^3.

Insertions are powers of the hyperplane class, ``Delta_j = [omega^j]`` for
``j = 0..3``.  After the fundamental-class, divisor and degree axioms every
invariant reduces to

    N_d(a, b) = GW_d(Delta_2^a, Delta_3^b),    a + 2b = 4d,

which are produced degree by degree by solving the linear system that the
associativity (WDVV) equations impose on them, starting from the single
seed N_1(0, 2) = 1 (one line through two points).
"""
from __future__ import annotations

import threading
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Tuple, Union

from .exact_arith import SingularSystemError, solve_exact

__all__ = [
    "ClosedKey",
    "ClosedGW",
    "WDVVReconstructionError",
    "closed_zero",
    "metric",
    "inverse_metric",
]

DIM = 3  # complex dimension of CP^3; Delta_j for j > DIM is the zero class


class WDVVReconstructionError(RuntimeError):
    pass


class ClosedKey(NamedTuple):
    d: int
    a: int  # number of Delta_2 insertions
    b: int  # number of Delta_3 insertions


def closed_zero(i: int, j: int, k: int) -> Fraction:
    """Classical triple intersection of hyperplane powers on CP^3."""
    for x in (i, j, k):
        if not 0 <= x <= DIM:
            raise ValueError(f"cohomology index out of range: {x}")
    return Fraction(1) if i + j + k == DIM else Fraction(0)


def metric(i: int, j: int) -> Fraction:
    return closed_zero(0, i, j)


def inverse_metric(i: int, j: int) -> Fraction:
    if not (0 <= i <= DIM and 0 <= j <= DIM):
        raise ValueError("cohomology index out of range")
    return Fraction(1) if i == DIM - j else Fraction(0)


Counts = Tuple[int, int, int, int]


def _counts(insertions: Union[Iterable[int], Counts]) -> Counts:
    ins = list(insertions)
    n = [0, 0, 0, 0]
    for x in ins:
        if not 0 <= x <= DIM:
            raise ValueError(f"cohomology index out of range: {x}")
        n[x] += 1
    return (n[0], n[1], n[2], n[3])


def reduce_insertions(d: int, n0: int, n1: int, n2: int, n3: int) -> Tuple[int, Optional[ClosedKey]]:
    """Apply the axioms to ``GW_d(Delta_0^n0, Delta_1^n1, Delta_2^n2, Delta_3^n3)``.

    Returns ``(value, None)`` when the axioms settle the invariant outright,
    otherwise ``(factor, key)`` with the invariant equal to
    ``factor * N(key)``.
    """
    if d < 0:
        return 0, None
    if d == 0:
        if n0 + n1 + n2 + n3 != 3:
            return 0, None
        return int(n1 + 2 * n2 + 3 * n3 == DIM), None
    if n0:
        return 0, None
    if n2 + 2 * n3 != 4 * d:
        return 0, None
    return d**n1, ClosedKey(d, n2, n3)


class _Linear:
    """Affine form ``const + sum coeffs[u] * u`` over the unknowns of one degree."""

    __slots__ = ("const", "coeffs")

    def __init__(self, const=0, coeffs: Optional[Dict[ClosedKey, Fraction]] = None):
        self.const = const
        self.coeffs = coeffs if coeffs is not None else {}

    def add_scaled(self, other: "_Linear", s: Fraction) -> None:
        if not s:
            return
        self.const += s * other.const
        for u, c in other.coeffs.items():
            self.coeffs[u] = self.coeffs.get(u, 0) + s * c


class ClosedGW:
    """Memoized closed invariants of CP^3.

    Values are computed on demand; solving degree ``d`` pulls in every lower
    degree it needs.  Stored values never change after being written.
    """

    SEED = (ClosedKey(1, 0, 2), Fraction(1))

    def __init__(self) -> None:
        self._cache: Dict[ClosedKey, Fraction] = {}
        self._lock = threading.RLock()
        self._solving: set = set()

    # -- public surface -----------------------------------------------------

    def gw(self, d: int, insertions: Iterable[int]) -> Fraction:
        """``GW_d`` of a multiset of insertion indices in ``0..3``."""
        return self.gw_counts(d, *_counts(insertions))

    def gw_counts(self, d: int, n0: int, n1: int, n2: int, n3: int) -> Fraction:
        factor, key = reduce_insertions(d, n0, n1, n2, n3)
        if key is None or not factor:
            return Fraction(factor)
        return factor * self.reduced(key)

    def reduced(self, key: Union[ClosedKey, Tuple[int, int, int]]) -> Fraction:
        key = ClosedKey(*key)
        if key.d < 1 or key.a < 0 or key.b < 0 or key.a + 2 * key.b != 4 * key.d:
            raise ValueError(f"invalid closed key {tuple(key)}")
        try:
            return self._cache[key]
        except KeyError:
            pass
        self._solve_degree(key.d)
        return self._cache[key]

    def records(self) -> List[Tuple[ClosedKey, Fraction]]:
        return sorted(self._cache.items())

    def preload(self, records: Iterable[Tuple[ClosedKey, Fraction]]) -> None:
        with self._lock:
            for key, value in records:
                key = ClosedKey(*key)
                old = self._cache.get(key)
                if old is not None and old != value:
                    raise ValueError(f"conflicting cached value for {tuple(key)}")
                self._cache[key] = Fraction(value)

    def clear(self) -> None:
        with self._lock:
            self._cache.clear()

    def wdvv_residual(self, i: int, j: int, k: int, l: int, d: int, a: int, b: int) -> Fraction:
        """Coefficient of ``q^d t_2^a t_3^b / (a! b!)`` in LHS - RHS of the
        WDVV equation for ``(i, j, k, l)``, using stored or computed values."""
        form = self._residual_form(i, j, k, l, d, a, b, unknown_degree=None)
        return Fraction(form.const)

    # -- reconstruction -----------------------------------------------------

    def _known(self, key: ClosedKey) -> int:
        v = self.reduced(key)
        # every closed invariant of CP^3 is integral; ints keep the solve fast
        return v.numerator if v.denominator == 1 else v

    def _term(self, d: int, n: List[int], unknown_degree: Optional[int]) -> _Linear:
        factor, key = reduce_insertions(d, *n)
        if key is None or not factor:
            return _Linear(factor)
        if unknown_degree is not None and key.d == unknown_degree:
            return _Linear(0, {key: factor})
        return _Linear(factor * self._known(key))

    def _pair_sum(self, x: int, y: int, z: int, w: int, d: int, a: int, b: int,
                  unknown_degree: Optional[int]) -> _Linear:
        # sum over nu of d^3Phi/dt_x dt_y dt_nu * g^{nu,3-nu} * d^3Phi/dt_{3-nu} dt_z dt_w
        out = _Linear()
        for nu in range(DIM + 1):
            mu = DIM - nu
            for d1 in range(d + 1):
                d2 = d - d1
                for b1 in range(b + 1):
                    # the degree axiom fixes how many Delta_2 go left
                    if d1 == 0:
                        a1 = 0
                    else:
                        a1 = 4 * d1 - 2 * b1 - sum(t - 1 for t in (x, y, nu) if t >= 1)
                    if not 0 <= a1 <= a:
                        continue
                    left = [0, 0, 0, 0]
                    for idx in (x, y, nu):
                        left[idx] += 1
                    left[2] += a1
                    left[3] += b1
                    fl, kl = reduce_insertions(d1, *left)
                    if not fl:
                        continue
                    right = [0, 0, 0, 0]
                    for idx in (mu, z, w):
                        right[idx] += 1
                    right[2] += a - a1
                    right[3] += b - b1
                    fr, kr = reduce_insertions(d2, *right)
                    if not fr:
                        continue
                    weight = comb(a, a1) * comb(b, b1)
                    tl = self._term(d1, left, unknown_degree)
                    tr = self._term(d2, right, unknown_degree)
                    if tl.coeffs and tr.coeffs:
                        raise WDVVReconstructionError("quadratic term in unknowns")
                    if tl.coeffs:
                        out.add_scaled(tl, weight * tr.const)
                    else:
                        out.add_scaled(tr, weight * tl.const)
        return out

    def _residual_form(self, i: int, j: int, k: int, l: int, d: int, a: int, b: int,
                       unknown_degree: Optional[int]) -> _Linear:
        for x in (i, j, k, l):
            if not 0 <= x <= DIM:
                raise ValueError(f"cohomology index out of range: {x}")
        lhs = self._pair_sum(i, j, k, l, d, a, b, unknown_degree)
        rhs = self._pair_sum(j, k, i, l, d, a, b, unknown_degree)
        lhs.add_scaled(rhs, -1)
        return lhs

    def equations(self, d: int) -> Iterator[Tuple[Tuple[int, int, int, int], int, int, _Linear]]:
        """All coefficient equations whose unknowns live in degree ``d``.

        Each multiset ``{i, j, k, l}`` of indices in ``1..3`` yields the two
        independent pairings; every other ordering repeats one of them.
        """
        quads = []
        for i in range(1, 4):
            for j in range(i, 4):
                for k in range(j, 4):
                    for l in range(k, 4):
                        quads.append((i, j, k, l))
                        quads.append((j, i, k, l))
        for q in quads:
            target = 4 * d + 3 - sum(q)
            if target < 0:
                continue
            for b in range(target // 2 + 1):
                a = target - 2 * b
                form = self._residual_form(*q, d, a, b, unknown_degree=d)
                if form.coeffs:
                    yield q, a, b, form

    def _solve_degree(self, d: int) -> None:
        with self._lock:
            if ClosedKey(d, 0, 2 * d) in self._cache and all(
                ClosedKey(d, 4 * d - 2 * b, b) in self._cache for b in range(2 * d + 1)
            ):
                return
            if d in self._solving:
                raise WDVVReconstructionError(f"WDVV reconstruction failure at degree {d}: cyclic request")
            self._solving.add(d)
            try:
                unknowns = [ClosedKey(d, 4 * d - 2 * b, b) for b in range(2 * d + 1)]
                index = {u: n for n, u in enumerate(unknowns)}
                rows: List[List[Fraction]] = []
                if d == self.SEED[0].d:
                    seed_row = [Fraction(0)] * (len(unknowns) + 1)
                    seed_row[index[self.SEED[0]]] = Fraction(1)
                    seed_row[-1] = self.SEED[1]
                    rows.append(seed_row)
                for _, _, _, form in self.equations(d):
                    row = [Fraction(0)] * (len(unknowns) + 1)
                    for u, c in form.coeffs.items():
                        row[index[u]] += c
                    row[-1] = -form.const
                    rows.append(row)
                try:
                    values = solve_exact(rows, len(unknowns))
                except SingularSystemError as exc:
                    raise WDVVReconstructionError(f"WDVV reconstruction failure at degree {d}") from exc
                for u, v in zip(unknowns, values):
                    old = self._cache.get(u)
                    if old is not None and old != v:
                        raise WDVVReconstructionError(
                            f"WDVV reconstruction failure at degree {d}: cached {tuple(u)} disagrees")
                    self._cache[u] = v
            finally:
                self._solving.discard(d)
