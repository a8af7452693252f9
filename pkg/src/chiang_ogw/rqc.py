"""Small relative quantum cohomology of (CP^3, L).

Elements are finite sums of basis classes ``Gamma_0 .. Gamma_3`` and
``Gamma_diamond`` with coefficients in the quarter-power Novikov ring.
The product of two basis classes mixes three-point closed invariants
(landing on ``Gamma_0 .. Gamma_3`` at exponent ``4d``) with two-point open
invariants (landing on ``Gamma_diamond`` at exponent ``beta``).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Tuple, Union

from .closed_gw import DIM
from .exact_arith import NovikovSeries, RationalLike, as_rational, format_rational
from .open_gw import DIAMOND, OpenGW

__all__ = [
    "BASIS",
    "QHElement",
    "QuantumRing",
    "RelationResult",
    "RingReport",
    "basis_name",
]

BASIS: Tuple[int, ...] = (0, 1, 2, 3, DIAMOND)

Scalar = Union[NovikovSeries, RationalLike]


def basis_name(b: int) -> str:
    return "Γ_⋄" if b == DIAMOND else f"Γ_{b}"


def basis_degree(b: int) -> int:
    """Cohomological degree: ``|Gamma_j| = 2j`` and ``|Gamma_diamond| = 4``."""
    return 4 if b == DIAMOND else 2 * b


def _series(x: Scalar) -> NovikovSeries:
    return x if isinstance(x, NovikovSeries) else NovikovSeries.monomial(as_rational(x))


class QHElement:
    """Immutable element ``sum_b c_b * b`` with Novikov coefficients."""

    __slots__ = ("_coeffs",)

    def __init__(self, coefficients: Optional[Mapping[int, Scalar]] = None):
        clean: Dict[int, NovikovSeries] = {}
        for b, c in (coefficients or {}).items():
            if b not in BASIS:
                raise ValueError(f"unknown basis element {b!r}")
            s = _series(c)
            if s:
                clean[b] = s
        self._coeffs = dict(sorted(clean.items()))

    @classmethod
    def basis(cls, b: int) -> "QHElement":
        return cls({b: 1})

    @classmethod
    def q(cls, exponent: int, coefficient: RationalLike = 1, b: int = 0) -> "QHElement":
        """``coefficient * q^(exponent/4) * b``."""
        return cls({b: NovikovSeries.monomial(coefficient, exponent)})

    @property
    def coefficients(self) -> Dict[int, NovikovSeries]:
        return dict(self._coeffs)

    def coefficient(self, b: int) -> NovikovSeries:
        return self._coeffs.get(b, NovikovSeries())

    def terms(self) -> Iterator[Tuple[int, int, Fraction]]:
        """``(basis, exponent, value)`` triples in a fixed order."""
        for b, s in self._coeffs.items():
            for m, c in s.items():
                yield b, m, c

    def is_zero(self) -> bool:
        return not self._coeffs

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, QHElement):
            return self._coeffs == other._coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(tuple(self._coeffs.items()))

    def __add__(self, other: "QHElement") -> "QHElement":
        out = dict(self._coeffs)
        for b, s in other._coeffs.items():
            out[b] = out[b] + s if b in out else s
        return QHElement(out)

    def __neg__(self) -> "QHElement":
        return QHElement({b: -s for b, s in self._coeffs.items()})

    def __sub__(self, other: "QHElement") -> "QHElement":
        return self + (-other)

    def scale(self, s: Scalar) -> "QHElement":
        s = _series(s)
        return QHElement({b: c * s for b, c in self._coeffs.items()})

    def degrees(self) -> set:
        """Set of total degrees of the monomials, with ``|q^(1/4)| = 2``."""
        return {basis_degree(b) + 2 * m for b, m, _ in self.terms()}

    def to_json(self) -> List[Dict[str, object]]:
        return [
            {"basis": basis_name(b), "exponent": m, "value": format_rational(c)}
            for b, m, c in self.terms()
        ]

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        return " + ".join(
            f"{format_rational(c)} · q^{{{m}/4}} · {basis_name(b)}" for b, m, c in self.terms()
        )

    def __repr__(self) -> str:
        return f"QHElement({self})"


@dataclass
class RelationResult:
    name: str
    residual: QHElement

    @property
    def ok(self) -> bool:
        return self.residual.is_zero()

    def to_json(self) -> Dict[str, object]:
        return {"relation": self.name, "ok": self.ok, "residual": self.residual.to_json()}


@dataclass
class RingReport:
    title: str
    results: List[RelationResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.ok for r in self.results)

    def failures(self) -> List[RelationResult]:
        return [r for r in self.results if not r.ok]

    def to_json(self) -> Dict[str, object]:
        return {
            "check": self.title,
            "passed": self.passed,
            "count": len(self.results),
            "results": [r.to_json() for r in self.results],
        }

    def to_text(self, only_failures: bool = False) -> str:
        rows = self.failures() if only_failures else self.results
        lines = [f"{self.title}: {'PASS' if self.passed else 'FAIL'} ({len(self.results)} checks)"]
        for r in rows:
            lines.append(f"  {'ok  ' if r.ok else 'FAIL'} {r.name}: residual {r.residual}")
        return "\n".join(lines)


class QuantumRing:
    """The small product built on one open engine (and its closed engine)."""

    # two-point open invariants vanish beyond this degree: Gamma_3 x Gamma_3
    # is the largest pair, with beta = 2 + 2
    _OPEN_BETA_BOUND = 4

    def __init__(self, engine: Optional[OpenGW] = None):
        self.engine = engine if engine is not None else OpenGW()
        self._table: Dict[Tuple[int, int], QHElement] = {}

    def basis(self, b: int) -> QHElement:
        return QHElement.basis(b)

    def basis_product(self, u: int, v: int) -> QHElement:
        key = (min(u, v), max(u, v))
        hit = self._table.get(key)
        if hit is not None:
            return hit
        out: Dict[int, NovikovSeries] = {}
        if u != DIAMOND and v != DIAMOND:
            # closed part; Delta_diamond is zero
            for d in range((u + v + DIM) // 4 + 1):
                for l in range(DIM + 1):
                    gw = self.engine.closed.gw(d, (u, v, l))
                    if gw:
                        m = DIM - l
                        out[m] = out.get(m, NovikovSeries()) + NovikovSeries.monomial(gw, 4 * d)
        open_terms = {}
        for beta in range(self._OPEN_BETA_BOUND + 1):
            val = self.engine.ogw(beta, 0, u, v)
            if val:
                open_terms[beta] = val
        if open_terms:
            out[DIAMOND] = out.get(DIAMOND, NovikovSeries()) + NovikovSeries(open_terms)
        result = QHElement(out)
        self._table[key] = result
        return result

    def multiply(self, x: QHElement, y: QHElement) -> QHElement:
        total = QHElement()
        for u, su in x.coefficients.items():
            for v, sv in y.coefficients.items():
                total = total + self.basis_product(u, v).scale(su * sv)
        return total

    def power(self, x: QHElement, n: int) -> QHElement:
        if n < 0:
            raise ValueError("negative power")
        out = QHElement.basis(0)
        for _ in range(n):
            out = self.multiply(out, x)
        return out

    def open_coefficient(self, u: int, v: int, beta: int) -> Fraction:
        """Read ``OGW_{beta,0}(Gamma_u, Gamma_v)`` back off the product."""
        return self.basis_product(u, v).coefficient(DIAMOND).coefficient(beta)

    def verify_presentation(self) -> RingReport:
        x = QHElement.basis(1)
        y = QHElement.basis(DIAMOND)
        q = QHElement.q
        x2 = self.power(x, 2)
        x3 = self.multiply(x2, x)
        x4 = self.multiply(x3, x)
        rel = [
            ("x^4 - q + 35/64 q^(1/2) y", x4 - q(4) + q(2, Fraction(35, 64), DIAMOND)),
            ("y^2 - 5/4 q^(1/2) y", self.multiply(y, y) - q(2, Fraction(5, 4), DIAMOND)),
            ("x y + 3/4 q^(1/4) y", self.multiply(x, y) + q(1, Fraction(3, 4), DIAMOND)),
            ("x^2 - Gamma_2", x2 - QHElement.basis(2)),
            ("x^3 - Gamma_3 - 1/16 q^(1/4) y", x3 - QHElement.basis(3) - q(1, Fraction(1, 16), DIAMOND)),
        ]
        return RingReport("presentation", [RelationResult(n, r) for n, r in rel])

    def associativity_check(self) -> RingReport:
        report = RingReport("associativity")
        e = {b: QHElement.basis(b) for b in BASIS}
        for a in BASIS:
            for b in BASIS:
                ab = self.basis_product(a, b)
                for c in BASIS:
                    lhs = self.multiply(ab, e[c])
                    rhs = self.multiply(e[a], self.basis_product(b, c))
                    name = f"({basis_name(a)}*{basis_name(b)})*{basis_name(c)}"
                    report.results.append(RelationResult(name, lhs - rhs))
        for a in BASIS:
            for b in BASIS:
                # bypass the symmetric memo so commutativity is really tested
                lhs = self._fresh_product(a, b)
                rhs = self._fresh_product(b, a)
                report.results.append(
                    RelationResult(f"{basis_name(a)}*{basis_name(b)} = {basis_name(b)}*{basis_name(a)}", lhs - rhs))
        return report

    def _fresh_product(self, u: int, v: int) -> QHElement:
        saved = self._table
        self._table = {}
        try:
            return self.basis_product(u, v)
        finally:
            self._table = saved

    def grading_violations(self) -> List[Tuple[int, int]]:
        """Basis pairs whose product is not homogeneous of degree ``|u| + |v|``."""
        bad = []
        for u in BASIS:
            for v in BASIS:
                degs = self.basis_product(u, v).degrees()
                if degs and degs != {basis_degree(u) + basis_degree(v)}:
                    bad.append((u, v))
        return bad


def dumps(element: QHElement) -> str:
    return json.dumps(element.to_json(), sort_keys=True)
