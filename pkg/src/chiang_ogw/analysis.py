"""Tables of open invariants and the checks run over them.

Tables are immutable snapshots: a list of rows plus the basic invariants
that produced them.  Every analysis here is a single pass over a table and
never touches the engine again, except the P_R shift (which needs closed
invariants) and the substitution experiment (which builds its own engine).
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

from .closed_gw import ClosedGW
from .exact_arith import (
    RationalLike,
    as_rational,
    denominator_factorization,
    format_rational,
    is_power_of_four_denominator,
    is_power_of_two_denominator,
)
from .open_gw import BasicInvariants, OpenGW

__all__ = [
    "TableRow",
    "InvariantTable",
    "boundary_table",
    "interior_table",
    "display_value",
    "denominator_audit",
    "sign_periodicity",
    "monotonicity_violations",
    "pr_shift",
    "pr_certificate",
    "orientation_flip",
    "spin_flip",
    "override_check",
    "v_search",
]

FIXED_DISPLAY_MAX_BETA = 16
MINUS = "\u2212"  # display strings use the typographic minus; values stay ASCII
_SUPERSCRIPT = str.maketrans("-0123456789", "⁻⁰¹²³⁴⁵⁶⁷⁸⁹")


class TableRow(NamedTuple):
    beta: int
    k: int
    l2: int
    l3: int
    value: Fraction

    @property
    def key(self) -> Tuple[int, int, int, int]:
        return (self.beta, self.k, self.l2, self.l3)


# -- display --------------------------------------------------------------

def _decimal(r: Fraction, context_prec: int = 80) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = context_prec
        return Decimal(r.numerator) / Decimal(r.denominator)


def fixed_display(r: Fraction, places: int = 2) -> str:
    """Round half-to-even at ``places`` decimals, computed exactly."""
    if not r:
        return "0"
    scaled = r * 10**places
    n = round(scaled)  # Fraction rounding is exact and half-to-even
    sign = MINUS if n < 0 else ""
    n = abs(n)
    whole, frac = divmod(n, 10**places)
    return f"{sign}{whole}.{frac:0{places}d}"


def scientific_display(r: Fraction, digits: int = 3, two_stage: bool = True) -> str:
    """``m.mm·10^e`` with a Unicode superscript exponent.

    With ``two_stage`` the value is first rounded to ``digits + 1``
    significant digits and then to ``digits`` (both half-to-even), which is
    the convention of the reference table; ``1.38519e7`` becomes
    ``1.38·10⁷`` rather than ``1.39·10⁷``.
    """
    if not r:
        return "0"
    d = _decimal(r)
    with localcontext() as ctx:
        ctx.rounding = ROUND_HALF_EVEN
        for prec in ((digits + 1, digits) if two_stage else (digits,)):
            ctx.prec = prec
            d = +d
    sign, digs, exp = d.as_tuple()
    e = exp + len(digs) - 1
    mant = "".join(map(str, digs)).ljust(digits, "0")
    text = f"{mant[0]}.{mant[1:]}·10{str(e).translate(_SUPERSCRIPT)}"
    return (MINUS if sign else "") + text


def display_value(beta: int, value: Fraction) -> str:
    if beta <= FIXED_DISPLAY_MAX_BETA:
        return fixed_display(value)
    return scientific_display(value)


# -- tables -----------------------------------------------------------------

@dataclass(frozen=True)
class InvariantTable:
    kind: str
    rows: Tuple[TableRow, ...]
    basics: BasicInvariants = field(default_factory=BasicInvariants)
    beta_max: int = 0
    generated: str = ""
    # non-default transformations applied after generation
    notes: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        rows = tuple(sorted(TableRow(*r) for r in self.rows))
        keys = [r.key for r in rows]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate keys in invariant table")
        object.__setattr__(self, "rows", rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def get(self, beta: int, k: int, l2: int, l3: int) -> Fraction:
        for r in self.rows:
            if r.key == (beta, k, l2, l3):
                return r.value
        raise KeyError((beta, k, l2, l3))

    def with_values(self, values: Iterable[Fraction], note: str) -> "InvariantTable":
        rows = tuple(r._replace(value=v) for r, v in zip(self.rows, values))
        return replace(self, rows=rows, notes=self.notes + (note,))

    def metadata(self) -> Dict[str, object]:
        return {
            "kind": self.kind,
            "beta_max": self.beta_max,
            "basics": {k: format_rational(getattr(self.basics, k)) for k in ("v11", "v102", "v203")},
            "generated": self.generated,
            "notes": list(self.notes),
        }

    def records(self) -> List[Dict[str, object]]:
        return [
            {"beta": r.beta, "k": r.k, "l2": r.l2, "l3": r.l3,
             "value": format_rational(r.value), "display": display_value(r.beta, r.value)}
            for r in self.rows
        ]

    def to_json(self) -> str:
        return json.dumps(self.records(), ensure_ascii=False, indent=1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["beta", "k", "l2", "l3", "value", "display"], lineterminator="\n")
        w.writeheader()
        w.writerows(self.records())
        return buf.getvalue()

    def to_markdown(self) -> str:
        lines = ["| beta | k | l2 | l3 | value | display |", "|---:|---:|---:|---:|---:|---:|"]
        for rec in self.records():
            lines.append("| {beta} | {k} | {l2} | {l3} | {value} | {display} |".format(**rec))
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        recs = self.records()
        cols = ["beta", "k", "l2", "l3", "value", "display"]
        widths = {c: max([len(c)] + [len(str(r[c])) for r in recs]) for c in cols}
        out = ["  ".join(c.rjust(widths[c]) for c in cols)]
        for r in recs:
            out.append("  ".join(str(r[c]).rjust(widths[c]) for c in cols))
        return "\n".join(out) + "\n"

    def render(self, fmt: str) -> str:
        emit = {"json": lambda: self.to_json() + "\n", "csv": self.to_csv,
                "md": self.to_markdown, "text": self.to_text}
        try:
            return emit[fmt]()
        except KeyError:
            raise ValueError(f"unknown format {fmt!r}") from None


def _stamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _check_beta_max(beta_max: int) -> None:
    if not isinstance(beta_max, int) or beta_max < 1:
        raise ValueError("beta_max must be a positive integer")


def boundary_table(engine: OpenGW, beta_max: int) -> InvariantTable:
    """``OGW_{beta,beta}`` (boundary points only) for ``beta = 1..beta_max``."""
    _check_beta_max(beta_max)
    rows = [TableRow(b, b, 0, 0, engine.value(b, b)) for b in range(1, beta_max + 1)]
    return InvariantTable("boundary", tuple(rows), engine.basics, beta_max, _stamp())


def interior_table(engine: OpenGW, beta_max: int, l3_max: int = 3) -> InvariantTable:
    """``OGW_{beta,0}(Gamma_2^l2, Gamma_3^l3)`` with ``l2 = beta - 2 l3``.

    When ``beta < 2 l3`` no choice of ``l2`` balances the degree; the row
    is kept with ``l2 = 0`` and value 0.
    """
    _check_beta_max(beta_max)
    rows = []
    for b in range(1, beta_max + 1):
        for l3 in range(l3_max + 1):
            l2 = b - 2 * l3
            if l2 < 0:
                rows.append(TableRow(b, 0, 0, l3, Fraction(0)))
            else:
                rows.append(TableRow(b, 0, l2, l3, engine.value(b, 0, (0, 0, l2, l3, 0))))
    return InvariantTable("interior", tuple(rows), engine.basics, beta_max, _stamp())


# -- audits -----------------------------------------------------------------

def denominator_audit(table: InvariantTable) -> Dict[str, object]:
    """Factor every denominator.

    Rows without interior constraints should have power-of-4 denominators;
    all rows should have power-of-2 denominators.
    """
    rows = []
    violations = []
    boundary_ok = True
    all_two = True
    for r in table.rows:
        fac = denominator_factorization(r.value)
        two = is_power_of_two_denominator(r.value)
        four = is_power_of_four_denominator(r.value)
        boundary_only = r.l2 == 0 and r.l3 == 0
        rows.append({"key": list(r.key), "value": format_rational(r.value),
                     "factorization": {str(p): e for p, e in fac.items()},
                     "power_of_two": two, "power_of_four": four})
        all_two &= two
        if boundary_only:
            boundary_ok &= four
        if not two or (boundary_only and not four):
            odd = sorted(p for p in fac if p != 2)
            violations.append({"key": list(r.key), "value": format_rational(r.value), "odd_primes": odd,
                               "reason": "odd prime" if odd else "odd power of 2"})
    return {"rows": rows, "boundary_power_of_four": boundary_ok,
            "all_power_of_two": all_two, "violations": violations,
            "passed": not violations}


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def sign_periodicity(table: InvariantTable, beta_limit: Optional[int] = None) -> Dict[str, object]:
    """Check ``sign OGW_{beta+8} = -sign OGW_beta`` on a boundary table.

    Pairs with a vanishing member carry no sign and are skipped.
    """
    vals = {r.beta: r.value for r in table.rows if r.k == r.beta}
    top = max(vals) if beta_limit is None else min(beta_limit, max(vals))
    if top < 9:
        raise ValueError("sign periodicity needs a boundary table reaching beta >= 9")
    checked, skipped, mismatches = [], [], []
    for b in range(1, top - 7):
        if b not in vals or b + 8 not in vals:
            continue
        s1, s2 = _sign(vals[b]), _sign(vals[b + 8])
        if s1 == 0 or s2 == 0:
            skipped.append(b)
            continue
        checked.append(b)
        if s1 != -s2:
            mismatches.append(b)
    return {"checked": checked, "skipped": skipped, "mismatches": mismatches, "passed": not mismatches}


def monotonicity_violations(table: InvariantTable) -> List[int]:
    """All ``beta`` with ``|OGW_{beta-1}| > |OGW_beta|`` on a boundary table."""
    vals = {r.beta: r.value for r in table.rows if r.k == r.beta}
    return [b for b in sorted(vals) if b - 1 in vals and abs(vals[b - 1]) > abs(vals[b])]


# -- transformations --------------------------------------------------------

def pr_shift(table: InvariantTable, p: RationalLike, closed: ClosedGW) -> InvariantTable:
    """Change the choice of left inverse so that it sends ``Delta_2`` to ``p``.

    Only rows with ``k = 0`` and ``beta`` divisible by 4 (the image of closed
    classes) move, by ``(beta/4) * GW_{beta/4}(constraints) * p``.
    """
    p = as_rational(p)
    new = []
    for r in table.rows:
        v = r.value
        if r.k == 0 and r.beta % 4 == 0 and p:
            d = r.beta // 4
            v = v - d * closed.gw_counts(d, 0, 0, r.l2, r.l3) * p
        new.append(v)
    return table.with_values(new, f"pr_shift p={format_rational(p)}")


def pr_certificate(engine: OpenGW) -> Dict[str, object]:
    """Try to pick ``p`` so that both degree-4 mixed invariants vanish."""
    constraints = [((4, 0, 0, 2), (0, 0, 0, 2, 0)), ((4, 0, 2, 1), (0, 0, 2, 1, 0))]
    solved = []
    for key, raw in constraints:
        value = engine.value(4, 0, raw)
        gw = engine.closed.gw_counts(1, *raw[:4])
        # value - 1 * gw * p = 0
        solved.append({"key": list(key), "value": format_rational(value),
                       "closed": format_rational(gw), "p": format_rational(value / gw)})
    consistent = solved[0]["p"] == solved[1]["p"]
    return {"constraints": solved, "verdict": "consistent" if consistent else "inconsistent"}


def orientation_flip(table: InvariantTable) -> InvariantTable:
    """Reverse the orientation of the Lagrangian: sign ``(-1)^(k+1)``."""
    return table.with_values(
        [r.value if (r.k + 1) % 2 == 0 else -r.value for r in table.rows], "orientation_flip")


def spin_flip(table: InvariantTable) -> InvariantTable:
    """Twist the spin structure by the nontrivial class in ``H^1(L; Z/2)``.

    ``H_1(L)`` is cyclic of order 4 and the boundary of the generator of
    relative degree 1 generates it, so the class pairs with ``dbeta`` as
    ``beta mod 2``; the sign is ``(-1)^beta``.
    """
    return table.with_values([-r.value if r.beta % 2 else r.value for r in table.rows], "spin_flip")


# -- substitution experiment ----------------------------------------------

def override_check(v: RationalLike, M: int, closed: Optional[ClosedGW] = None) -> Dict[str, object]:
    """Recompute ``OGW_{k,k}``, ``k = 1..M+1``, with ``OGW_{1,0}(Gamma_2) := v``.

    Raises :class:`DivisorZero` when ``v`` kills the divisor of recursion (b).
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    v = as_rational(v)
    engine = OpenGW(closed if closed is not None else ClosedGW(), BasicInvariants().with_v102(v),
                    beta_max=max(M + 1, 2))
    rows = []
    for k in range(1, M + 2):
        val = engine.value(k, k)
        fac = denominator_factorization(val)
        rows.append({"k": k, "value": format_rational(val),
                     "factorization": {str(p): e for p, e in fac.items()},
                     "power_of_two": is_power_of_two_denominator(val),
                     "odd_primes": sorted(p for p in fac if p != 2)})
    passed = all(r["power_of_two"] for r in rows[:M])
    return {"v": format_rational(v), "M": M, "rows": rows, "passed": passed,
            "next_odd_primes": rows[M]["odd_primes"]}


def _passes(v: Fraction, M: int, closed: ClosedGW) -> bool:
    engine = OpenGW(closed, BasicInvariants().with_v102(v), beta_max=max(M, 2))
    try:
        return all(is_power_of_two_denominator(engine.value(k, k)) for k in range(1, M + 1))
    except ZeroDivisionError:
        return False


def _rigid_candidates(denominator_exponent_bound: int, odd_part: int = 35) -> Iterable[Fraction]:
    # 8 + 3v = +-odd_part / 2^s keeps the divisor -(8 + 3v)/16 of the
    # boundary recursion at the same odd numerator as the standard value
    for s in range(0, denominator_exponent_bound + 5):
        for sign in (1, -1):
            yield (Fraction(sign * odd_part, 2**s) - 8) / 3


def _plain_candidates(numerator_bound: int, denominator_exponent_bound: int) -> Iterable[Fraction]:
    small = min(numerator_bound, 64)
    for t in range(min(denominator_exponent_bound, 8) + 1):
        for p in range(-small, small + 1):
            yield Fraction(p, 2**t)
    for c in (1, 3, 5, 7, 9, 15, 21, 35, 45, 63):
        yield from _rigid_candidates(denominator_exponent_bound, c)


def v_search(numerator_bound: int, denominator_exponent_bound: int, M: int,
             closed: Optional[ClosedGW] = None, mode: str = "plain",
             exclude_default: bool = True) -> List[Fraction]:
    """Heuristic scan for dyadic ``v`` keeping ``OGW_{k,k}``, ``k <= M``, dyadic.

    This is a heuristic and not exhaustive.  Every candidate has
    ``|numerator| <= numerator_bound`` and denominator ``2^t`` with
    ``t <= denominator_exponent_bound``.

    ``mode="plain"`` tries all ``p / 2^t`` with ``|p| <= 64``, ``t <= 8``,
    plus the values where ``8 + 3v`` is a small odd number over a power of
    two.  ``8 + 3v`` is, up to a constant, the divisor of the boundary
    recursion, so those values keep the division from adding odd primes.

    ``mode="rigid"`` keeps only ``8 + 3v = +-35 / 2^s``.  The divisor then
    has the same odd numerator as with the standard value, and the factors 5
    and 7 have to cancel exactly as they do there.
    """
    if numerator_bound < 1 or denominator_exponent_bound < 0 or M < 1:
        return []
    if mode == "plain":
        cands = set(_plain_candidates(numerator_bound, denominator_exponent_bound))
    elif mode == "rigid":
        cands = set(_rigid_candidates(denominator_exponent_bound))
    else:
        raise ValueError(f"unknown search mode {mode!r}")
    closed = closed if closed is not None else ClosedGW()
    dmax = 2**denominator_exponent_bound
    keep = [
        v for v in cands
        if abs(v.numerator) <= numerator_bound and v.denominator <= dmax
        and is_power_of_two_denominator(v)
    ]
    if exclude_default:
        keep = [v for v in keep if v != Fraction(1, 4)]
    return sorted(v for v in keep if _passes(v, M, closed))
