"""Exact rational arithmetic, quarter-power Novikov series and small
number-theoretic helpers shared by every other module.

Rationals are plain :class:`fractions.Fraction` values; they are always kept
in lowest terms with a positive denominator, which is exactly the canonical
form the cache files and reports rely on.
"""
from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

__all__ = [
    "ExactRational",
    "RationalLike",
    "as_rational",
    "format_rational",
    "parse_rational",
    "denominator_factorization",
    "is_power_of_two_denominator",
    "is_power_of_four_denominator",
    "NovikovSeries",
    "SingularSystemError",
    "solve_exact",
]

ExactRational = Fraction
RationalLike = Union[Fraction, int, str]

_TRIAL_LIMIT = 10**6


def as_rational(x: RationalLike) -> Fraction:
    """Coerce an int, Fraction or canonical string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def format_rational(r: Fraction) -> str:
    """Canonical wire form: ``p/q`` in lowest terms, ``p`` when q == 1."""
    r = as_rational(r)
    if r.denominator == 1:
        return str(r.numerator)
    return f"{r.numerator}/{r.denominator}"


def parse_rational(text: str) -> Fraction:
    """Inverse of :func:`format_rational`; accepts a leading ``+`` or ``-``.

    Decimal and exponent notation are rejected so that a cache file can only
    ever contain exact values.
    """
    s = text.strip().replace("−", "-")
    body = s[1:] if s[:1] in "+-" else s
    num, sep, den = body.partition("/")
    if not num.isdigit() or (sep and not den.isdigit()):
        raise ValueError(f"not a rational in p/q form: {text!r}")
    if sep and int(den) == 0:
        raise ZeroDivisionError(f"zero denominator in {text!r}")
    return Fraction(s)


# -- denominators -------------------------------------------------------------

def _is_probable_prime(n: int, rounds: int = 24) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    rng = random.Random(n)
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = pow(x, 2, n)
            if x == n - 1:
                break
        else:
            return False
    return True


def factor_integer(n: int) -> Tuple[Dict[int, int], int]:
    """Factor ``n > 0`` by trial division up to 10**6.

    Returns ``(factors, cofactor)``.  A leftover prime is folded into
    ``factors``; a composite that trial division could not split is
    returned as ``cofactor`` (1 otherwise).
    """
    if n <= 0:
        raise ValueError("factor_integer expects a positive integer")
    factors: Dict[int, int] = {}
    tz = (n & -n).bit_length() - 1
    if tz:
        factors[2] = tz
        n >>= tz
    p = 3
    while p * p <= n and p <= _TRIAL_LIMIT:
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
        p += 2
    cofactor = 1
    if n > 1:
        if p * p > n or _is_probable_prime(n):
            factors[n] = factors.get(n, 0) + 1
        else:
            cofactor = n
    return factors, cofactor


def denominator_factorization(r: RationalLike) -> Dict[int, int]:
    """Prime factorization of the denominator of ``r`` as ``{prime: exponent}``.

    An unsplit composite cofactor (never seen on real data) is reported under
    its own value as key, with exponent 1.
    """
    factors, cofactor = factor_integer(as_rational(r).denominator)
    if cofactor != 1:
        factors[cofactor] = 1
    return dict(sorted(factors.items()))


def _two_adic_exponent(n: int) -> Optional[int]:
    if n & (n - 1):
        return None
    return n.bit_length() - 1


def is_power_of_two_denominator(r: RationalLike) -> bool:
    return _two_adic_exponent(as_rational(r).denominator) is not None


def is_power_of_four_denominator(r: RationalLike) -> bool:
    e = _two_adic_exponent(as_rational(r).denominator)
    return e is not None and e % 2 == 0


# -- Novikov series -----------------------------------------------------------

class NovikovSeries:
    """A finite sum ``sum_m c_m q^(m/4)`` with exact coefficients.

    Exponents are counted in quarter powers of ``q`` and are never negative.
    Instances are immutable and hashable; zero coefficients are dropped.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[int, RationalLike]] = None):
        clean: Dict[int, Fraction] = {}
        for m, c in (terms or {}).items():
            if not isinstance(m, int) or m < 0:
                raise ValueError(f"exponent must be a nonnegative integer, got {m!r}")
            c = as_rational(c)
            if c:
                clean[m] = c
        self._terms = dict(sorted(clean.items()))
        self._hash: Optional[int] = None

    @classmethod
    def monomial(cls, coefficient: RationalLike, exponent: int = 0) -> "NovikovSeries":
        return cls({exponent: coefficient})

    @property
    def terms(self) -> Dict[int, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[int, Fraction]]:
        return iter(self._terms.items())

    def coefficient(self, exponent: int) -> Fraction:
        return self._terms.get(exponent, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, NovikovSeries):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == NovikovSeries.monomial(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __neg__(self) -> "NovikovSeries":
        return NovikovSeries({m: -c for m, c in self._terms.items()})

    def __add__(self, other: "NovikovSeries") -> "NovikovSeries":
        other = _lift(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return NovikovSeries(out)

    __radd__ = __add__

    def __sub__(self, other: "NovikovSeries") -> "NovikovSeries":
        return self + (-_lift(other))

    def __rsub__(self, other: "NovikovSeries") -> "NovikovSeries":
        return _lift(other) - self

    def __mul__(self, other: Union["NovikovSeries", RationalLike]) -> "NovikovSeries":
        other = _lift(other)
        out: Dict[int, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                out[m1 + m2] = out.get(m1 + m2, Fraction(0)) + c1 * c2
        return NovikovSeries(out)

    __rmul__ = __mul__

    def shift(self, exponent: int) -> "NovikovSeries":
        """Multiply by ``q^(exponent/4)``."""
        return NovikovSeries({m + exponent: c for m, c in self._terms.items()})

    def __repr__(self) -> str:
        return f"NovikovSeries({ {m: format_rational(c) for m, c in self._terms.items()} })"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m, c in self._terms.items():
            parts.append(format_rational(c) if m == 0 else f"{format_rational(c)}*q^({m}/4)")
        return " + ".join(parts)


def _lift(x: Union[NovikovSeries, RationalLike]) -> NovikovSeries:
    if isinstance(x, NovikovSeries):
        return x
    return NovikovSeries.monomial(x)


# -- exact linear solve ------------------------------------------------------

class SingularSystemError(ArithmeticError):
    """The linear system is underdetermined or inconsistent."""


def _integer_row(row: Sequence[Fraction]) -> List[int]:
    lcm = 1
    for x in row:
        lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
    return [int(x * lcm) for x in row]


def solve_exact(rows: Iterable[Sequence[RationalLike]], n_unknowns: int) -> List[Fraction]:
    """Solve an overdetermined-but-consistent system ``A x = b`` exactly.

    Each row is ``[a_0, ..., a_{n-1}, b]``.  Rows are cleared of denominators
    and reduced with Bareiss fraction-free elimination, so all intermediate
    entries stay integral.  Raises :class:`SingularSystemError` when the rank
    is below ``n_unknowns`` or a reduced row reads ``0 = c`` with ``c != 0``.
    """
    mat = [_integer_row([as_rational(x) for x in r]) for r in rows]
    for r in mat:
        if len(r) != n_unknowns + 1:
            raise ValueError("row length does not match number of unknowns")
    n_rows = len(mat)
    prev = 1
    piv_row = 0
    pivots: List[int] = []
    for col in range(n_unknowns):
        sel = next((i for i in range(piv_row, n_rows) if mat[i][col] != 0), None)
        if sel is None:
            raise SingularSystemError(f"no pivot for unknown {col}")
        mat[piv_row], mat[sel] = mat[sel], mat[piv_row]
        p = mat[piv_row]
        for i in range(piv_row + 1, n_rows):
            r = mat[i]
            f = r[col]
            for j in range(col + 1, n_unknowns + 1):
                # Bareiss step: exact division by the previous pivot.
                r[j] = (p[col] * r[j] - f * p[j]) // prev
            r[col] = 0
        prev = p[col]
        pivots.append(col)
        piv_row += 1
    for i in range(piv_row, n_rows):
        if mat[i][n_unknowns] != 0:
            raise SingularSystemError("inconsistent system")
    x = [Fraction(0)] * n_unknowns
    for i in range(n_unknowns - 1, -1, -1):
        r = mat[i]
        s = Fraction(r[n_unknowns])
        for j in range(i + 1, n_unknowns):
            s -= r[j] * x[j]
        x[i] = s / r[i]
    return x
