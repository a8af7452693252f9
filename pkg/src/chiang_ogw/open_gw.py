"""Open Gromov-Witten invariants of (CP^3, Chiang Lagrangian).

Relative classes are ``Gamma_0 .. Gamma_3`` (powers of omega) plus
``Gamma_diamond``, the image of the point class of the Lagrangian.  The
relative degree ``beta`` is an integer, a closed curve of degree ``d``
sits at ``beta = 4d``, the Maslov index is ``2 beta`` and ``Gamma_1``
integrates to ``beta / 4``.

Every query is first normalized by the axioms (wall-crossing, unit, zero,
divisor, degree) to ``coefficient * OGW(key)`` where the key only carries
boundary points and ``Gamma_2`` / ``Gamma_3`` constraints.  Keys are then
evaluated by the three open WDVV recursions, seeded with the three basic
invariants, in lexicographic order on ``(beta, k, l, smallest index)``.
"""
from __future__ import annotations

import threading
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from .closed_gw import ClosedGW
from .exact_arith import RationalLike, as_rational

__all__ = [
    "DIAMOND",
    "BasicInvariants",
    "OpenKey",
    "RawConstraints",
    "OpenGW",
    "CyclicDependency",
    "DivisorZero",
    "multiset_splits",
]

DIAMOND = 4  # position of Gamma_diamond in raw constraint lists
DEFAULT_BETA_MAX = 64


class CyclicDependency(RuntimeError):
    """A key was requested while already being evaluated."""


class DivisorZero(ZeroDivisionError):
    """OGW_{2,0}(Gamma_2, Gamma_2) vanished, so recursion (b) cannot be solved."""


class OpenKey(NamedTuple):
    beta: int
    k: int
    l2: int
    l3: int

    @property
    def l(self) -> int:
        return self.l2 + self.l3


class RawConstraints(NamedTuple):
    c0: int = 0
    c1: int = 0
    c2: int = 0
    c3: int = 0
    cd: int = 0

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> "RawConstraints":
        """Counts from a list of class indices (``DIAMOND`` for Gamma_diamond)."""
        n = [0] * 5
        for x in indices:
            if not 0 <= x <= DIAMOND:
                raise ValueError(f"constraint index out of range: {x}")
            n[x] += 1
        return cls(*n)


@dataclass(frozen=True)
class BasicInvariants:
    """OGW_{1,1}, OGW_{1,0}(Gamma_2) and OGW_{2,0}(Gamma_3)."""

    v11: Fraction = Fraction(3)
    v102: Fraction = Fraction(1, 4)
    v203: Fraction = Fraction(-1)

    def __post_init__(self) -> None:
        for name in ("v11", "v102", "v203"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))

    def with_v102(self, v: RationalLike) -> "BasicInvariants":
        return BasicInvariants(self.v11, as_rational(v), self.v203)

    @property
    def is_default(self) -> bool:
        return self == BasicInvariants()


def multiset_splits(l2: int, l3: int) -> Iterator[Tuple[Tuple[int, int], Tuple[int, int], int]]:
    """Ways to split ``Gamma_2^l2 Gamma_3^l3`` into two labelled parts.

    Yields ``((a2, a3), (l2 - a2, l3 - a3), weight)`` where ``weight`` counts
    the subsets of the labelled constraints that give this split.
    """
    for a2 in range(l2 + 1):
        w2 = comb(l2, a2)
        for a3 in range(l3 + 1):
            yield (a2, a3), (l2 - a2, l3 - a3), w2 * comb(l3, a3)


def _raw(indices: Sequence[int], n2: int = 0, n3: int = 0) -> Optional[RawConstraints]:
    """Constraint counts for ``indices`` plus extra Gamma_2/Gamma_3.

    Indices above 3 stand for omega^4 = 0 and make the whole term vanish.
    """
    n = [0, 0, n2, n3, 0]
    for x in indices:
        if x > 3:
            return None
        n[x] += 1
    return RawConstraints(*n)


_ZERO = Fraction(0)


class OpenGW:
    """Memoized evaluator of the open invariants.

    ``closed`` may be shared between engines with different basic values;
    the open cache belongs to one set of basic invariants.
    """

    def __init__(
        self,
        closed: Optional[ClosedGW] = None,
        basics: Optional[BasicInvariants] = None,
        beta_max: int = DEFAULT_BETA_MAX,
        debug: bool = False,
    ) -> None:
        self.closed = closed if closed is not None else ClosedGW()
        self.basics = basics if basics is not None else BasicInvariants()
        self.beta_max = beta_max
        self.debug = debug
        self.dispatch_stats: Counter = Counter()
        self._cache: Dict[OpenKey, Fraction] = {}
        self._lock = threading.Lock()
        self._local = threading.local()

    # -- normalization --------------------------------------------------------

    def normalize(self, beta: int, k: int, raw: Iterable[int]) -> Tuple[Fraction, Optional[OpenKey]]:
        """Reduce ``OGW_{beta,k}(raw)`` by the axioms.

        Returns ``(c, key)`` meaning ``c * OGW(key)``, or ``(value, None)``
        when the axioms determine the invariant (``(0, None)`` for zero).
        """
        c0, c1, c2, c3, cd = RawConstraints(*raw)
        if min(c0, c1, c2, c3, cd, k) < 0:
            raise ValueError("constraint counts and k must be nonnegative")
        if beta < 0:
            return _ZERO, None
        coef = Fraction(-1 if cd % 2 else 1)
        # wall-crossing: each interior Gamma_diamond becomes a boundary point
        k += cd
        if c0:
            # unit axiom; P_R vanishes on Gamma_0..Gamma_3, so only the
            # (beta, k, l) = (0, 1, 1) case survives
            if beta == 0 and k == 1 and c0 == 1 and c1 + c2 + c3 == 0:
                return -coef, None
            return _ZERO, None
        if beta == 0:
            # zero axiom: P_R(Gamma_a cup Gamma_b) = 0 for a, b >= 1
            return _ZERO, None
        if c1:
            coef *= Fraction(beta, 4) ** c1
        if beta != k + c2 + 2 * c3:
            return _ZERO, None
        if beta > self.beta_max:
            raise ValueError(f"beta = {beta} exceeds the configured cap {self.beta_max}")
        return coef, OpenKey(beta, k, c2, c3)

    def value(self, beta: int, k: int, raw: Iterable[int] = RawConstraints()) -> Fraction:
        """``OGW_{beta,k}`` of a raw constraint count vector."""
        coef, key = self.normalize(beta, k, raw)
        if key is None or not coef:
            return coef
        return coef * self.invariant(key)

    def ogw(self, beta: int, k: int, *indices: int) -> Fraction:
        """``OGW_{beta,k}(Gamma_{i_1}, ...)`` with ``DIAMOND`` for Gamma_diamond."""
        return self.value(beta, k, RawConstraints.from_indices(indices))

    # -- evaluation ---------------------------------------------------------

    @property
    def _stack(self) -> Dict[OpenKey, None]:
        st = getattr(self._local, "stack", None)
        if st is None:
            st = self._local.stack = {}
        return st

    def invariant(self, key: Iterable[int]) -> Fraction:
        key = OpenKey(*key)
        if key.beta != key.k + key.l2 + 2 * key.l3 or key.beta < 1 or min(key) < 0:
            raise ValueError(f"{tuple(key)} violates beta = k + l2 + 2*l3")
        try:
            return self._cache[key]
        except KeyError:
            pass
        stack = self._stack
        if key in stack:
            raise CyclicDependency(f"{tuple(key)} re-entered; stack depth {len(stack)}")
        stack[key] = None
        try:
            result = self._dispatch(key)
        finally:
            del stack[key]
        with self._lock:
            self._cache.setdefault(key, result)
        return result

    def _dispatch(self, key: OpenKey) -> Fraction:
        b = self.basics
        base = {
            OpenKey(1, 1, 0, 0): b.v11,
            OpenKey(1, 0, 1, 0): b.v102,
            OpenKey(2, 0, 0, 1): b.v203,
        }
        if key in base:
            self.dispatch_stats["basic"] += 1
            return base[key]
        if key.l >= 2:
            self.dispatch_stats["c"] += 1
            return self.recursion_c(key)
        if key.k >= 2:
            self.dispatch_stats["b"] += 1
            return self.recursion_b(key)
        if key.k >= 1 and key.l >= 1:
            self.dispatch_stats["a"] += 1
            return self.recursion_a(key)
        raise AssertionError(f"no recursion applies to {tuple(key)}")

    def _term(self, parent: OpenKey, beta: int, k: int, raw: Optional[RawConstraints]) -> Tuple[Fraction, Optional[OpenKey]]:
        if raw is None:
            return _ZERO, None
        coef, key = self.normalize(beta, k, raw)
        if self.debug and beta > parent.beta and coef:
            raise AssertionError(f"term of degree {beta} > {parent.beta} survived in {tuple(parent)}")
        return coef, key

    def _eval(self, t: Tuple[Fraction, Optional[OpenKey]]) -> Fraction:
        coef, key = t
        if key is None or not coef:
            return coef
        return coef * self.invariant(key)

    def _product(self, parent: OpenKey, left: Tuple[int, int, Optional[RawConstraints]],
                 right: Tuple[int, int, Optional[RawConstraints]]) -> Fraction:
        # Normalize both factors before evaluating either, so a factor that
        # vanishes by an axiom never triggers evaluation of its partner.
        tl = self._term(parent, *left)
        if not tl[0]:
            return _ZERO
        tr = self._term(parent, *right)
        if not tr[0]:
            return _ZERO
        return self._eval(tl) * self._eval(tr)

    @staticmethod
    def _split_first(key: OpenKey) -> Tuple[int, Tuple[int, int]]:
        """Smallest constraint index and the counts of the remaining ones."""
        if key.l2:
            return 2, (key.l2 - 1, key.l3)
        return 3, (0, key.l3 - 1)

    def recursion_a(self, key: OpenKey) -> Fraction:
        """Open WDVV relation for ``k >= 1``, ``l >= 1``."""
        key = OpenKey(*key)
        beta, k = key.beta, key.k
        if k < 1 or key.l < 1:
            raise ValueError("recursion (a) needs k >= 1 and l >= 1")
        j1, (m2, m3) = self._split_first(key)
        gw = self.closed.gw_counts
        total = _ZERO
        for d in range(1, beta // 4 + 1):
            beta1 = beta - 4 * d
            for (a2, a3), (r2, r3), w in multiset_splits(m2, m3):
                for i in range(4):
                    n = [0, 0, a2, a3]
                    for x in (j1 - 1, 1, i):
                        n[x] += 1
                    g = gw(d, *n)
                    if g:
                        total -= w * g * self._eval(self._term(key, beta1, k, _raw([3 - i], r2, r3)))
        for beta1 in range(beta + 1):
            beta2 = beta - beta1
            for k1 in range(k):
                k2 = k - 1 - k1
                c = comb(k - 1, k1)
                for (a2, a3), (r2, r3), w in multiset_splits(m2, m3):
                    s = self._product(key, (beta1, k1, _raw([j1 - 1, 1], a2, a3)),
                                      (beta2, k2 + 2, _raw([], r2, r3)))
                    s -= self._product(key, (beta1, k1 + 1, _raw([j1 - 1], a2, a3)),
                                       (beta2, k2 + 1, _raw([1], r2, r3)))
                    if s:
                        total += c * w * s
        return total

    def recursion_b(self, key: OpenKey) -> Fraction:
        """Open WDVV relation for ``k >= 2``, solved for OGW_{beta,k}."""
        key = OpenKey(*key)
        beta, k, l2, l3 = key
        if k < 2:
            raise ValueError("recursion (b) needs k >= 2")
        gw = self.closed.gw_counts
        top = beta + 2
        rhs = _ZERO
        for d in range(top // 4 + 1):
            beta1 = top - 4 * d
            for (a2, a3), (r2, r3), w in multiset_splits(l2, l3):
                for i in range(4):
                    n = [0, 0, 2 + a2, a3]
                    n[i] += 1
                    g = gw(d, *n)
                    if g:
                        rhs += w * g * self._eval(self._term(key, beta1, k - 1, _raw([3 - i], r2, r3)))
        for beta1 in range(top + 1):
            beta2 = top - beta1
            for k1 in range(k - 1):
                k2 = k - 2 - k1
                c = comb(k - 2, k1)
                for (a2, a3), (r2, r3), w in multiset_splits(l2, l3):
                    s = self._product(key, (beta1, k1 + 1, _raw([2], a2, a3)),
                                      (beta2, k2 + 1, _raw([2], r2, r3)))
                    if (beta1, k1) != (beta, k - 2):
                        s -= self._product(key, (beta1, k1 + 2, _raw([], a2, a3)),
                                           (beta2, k2, _raw([2, 2], r2, r3)))
                    if s:
                        rhs += c * w * s
        divisor = self.value(2, 0, RawConstraints(c2=2))
        if not divisor:
            raise DivisorZero("OGW_{2,0}(Gamma_2, Gamma_2) = 0; recursion (b) is not solvable")
        return rhs / divisor

    def recursion_c(self, key: OpenKey) -> Fraction:
        """Open WDVV relation for ``l >= 2``: moves one omega between the two
        smallest constraints."""
        key = OpenKey(*key)
        beta, k = key.beta, key.k
        if key.l < 2:
            raise ValueError("recursion (c) needs l >= 2")
        j1, (l2, l3) = self._split_first(key)
        rest = OpenKey(beta, k, l2, l3)
        j2, (m2, m3) = self._split_first(rest)
        gw = self.closed.gw_counts
        total = self._eval(self._term(key, beta, k, _raw([j1 - 1, j2 + 1], m2, m3)))
        for d in range(1, beta // 4 + 1):
            beta1 = beta - 4 * d
            for (a2, a3), (r2, r3), w in multiset_splits(m2, m3):
                for i in range(4):
                    n = [0, 0, a2, a3]
                    for x in (1, j2, i):
                        n[x] += 1
                    g = gw(d, *n)
                    if g:
                        total += w * g * self._eval(self._term(key, beta1, k, _raw([3 - i, j1 - 1], r2, r3)))
                    n = [0, 0, a2, a3]
                    for x in (1, j1 - 1, i):
                        n[x] += 1
                    g = gw(d, *n)
                    if g:
                        total -= w * g * self._eval(self._term(key, beta1, k, _raw([3 - i, j2], r2, r3)))
        for beta1 in range(beta + 1):
            beta2 = beta - beta1
            for k1 in range(k + 1):
                k2 = k - k1
                c = comb(k, k1)
                for (a2, a3), (r2, r3), w in multiset_splits(m2, m3):
                    s = self._product(key, (beta1, k1, _raw([1, j1 - 1], a2, a3)),
                                      (beta2, k2 + 1, _raw([j2], r2, r3)))
                    s -= self._product(key, (beta1, k1, _raw([1, j2], a2, a3)),
                                       (beta2, k2 + 1, _raw([j1 - 1], r2, r3)))
                    if s:
                        total += c * w * s
        return total

    # -- cache management ---------------------------------------------------

    def records(self) -> List[Tuple[OpenKey, Fraction]]:
        return sorted(self._cache.items())

    def preload(self, records: Iterable[Tuple[OpenKey, Fraction]]) -> None:
        with self._lock:
            for key, value in records:
                key = OpenKey(*key)
                old = self._cache.get(key)
                if old is not None and old != value:
                    raise ValueError(f"conflicting cached value for {tuple(key)}")
                self._cache[key] = Fraction(value)

    def clear(self) -> None:
        with self._lock:
            self._cache.clear()
        self.dispatch_stats.clear()

    def __contains__(self, key: object) -> bool:
        return key in self._cache
