"""Cache persistence and the ``chiang-ogw`` command line.

Cache files are plain text::

    chiang-ogw-cache v1
    C d a b value
    O beta k l2 l3 value

with values in canonical ``p/q`` form.  Open records are only meaningful for
the standard basic invariants, so loading them into an engine with an
overridden ``OGW_{1,0}(Gamma_2)`` is refused.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, TextIO, Tuple

from . import analysis
from .closed_gw import ClosedGW, ClosedKey, WDVVReconstructionError
from .exact_arith import format_rational, parse_rational
from .open_gw import DEFAULT_BETA_MAX, DIAMOND, BasicInvariants, CyclicDependency, DivisorZero, OpenGW, OpenKey
from .rqc import QHElement, QuantumRing

__all__ = [
    "CACHE_HEADER",
    "CacheFormatError",
    "dump_cache",
    "parse_cache",
    "store_cache",
    "load_cache",
    "main",
]

CACHE_HEADER = "chiang-ogw-cache v1"
ENV_CACHE = "CHIANG_OGW_CACHE"

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class CacheFormatError(ValueError):
    pass


# -- cache files --------------------------------------------------------------

def dump_cache(closed: ClosedGW, engine: Optional[OpenGW] = None) -> str:
    lines = [CACHE_HEADER]
    for key, value in closed.records():
        lines.append(f"C {key.d} {key.a} {key.b} {format_rational(value)}")
    if engine is not None:
        if not engine.basics.is_default:
            raise CacheFormatError("refusing to store open records computed with overridden basic invariants")
        for key, value in engine.records():
            lines.append(f"O {key.beta} {key.k} {key.l2} {key.l3} {format_rational(value)}")
    return "\n".join(lines) + "\n"


def parse_cache(text: str) -> Tuple[List[Tuple[ClosedKey, Fraction]], List[Tuple[OpenKey, Fraction]]]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != CACHE_HEADER:
        raise CacheFormatError(f"missing header {CACHE_HEADER!r}")
    closed: Dict[ClosedKey, Fraction] = {}
    opened: Dict[OpenKey, Fraction] = {}
    for n, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        try:
            if parts[0] == "C" and len(parts) == 5:
                key = ClosedKey(*map(int, parts[1:4]))
                if key.d < 1 or min(key) < 0 or key.a + 2 * key.b != 4 * key.d:
                    raise CacheFormatError(f"line {n}: invalid closed key {tuple(key)}")
                target: Dict = closed
            elif parts[0] == "O" and len(parts) == 6:
                key = OpenKey(*map(int, parts[1:5]))
                if key.beta < 1 or min(key) < 0 or key.beta != key.k + key.l2 + 2 * key.l3:
                    raise CacheFormatError(f"line {n}: invalid open key {tuple(key)}")
                target = opened
            else:
                raise CacheFormatError(f"line {n}: unrecognized record {line!r}")
            text_value = parts[-1]
            value = parse_rational(text_value)
        except (ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, CacheFormatError):
                raise
            raise CacheFormatError(f"line {n}: {exc}") from exc
        if format_rational(value) != text_value:
            raise CacheFormatError(f"line {n}: value {text_value!r} is not in canonical form")
        if key in target:
            raise CacheFormatError(f"line {n}: duplicate key {tuple(key)}")
        target[key] = value
    return sorted(closed.items()), sorted(opened.items())


def store_cache(path: os.PathLike, closed: ClosedGW, engine: Optional[OpenGW] = None) -> None:
    text = dump_cache(closed, engine)
    tmp = Path(f"{path}.tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def load_cache(path: os.PathLike, closed: ClosedGW, engine: Optional[OpenGW] = None) -> Tuple[int, int]:
    """Preload both engines from ``path``; returns the record counts."""
    c_rec, o_rec = parse_cache(Path(path).read_text(encoding="utf-8"))
    if o_rec and engine is not None and not engine.basics.is_default:
        raise CacheFormatError("cache holds open records for the standard basic invariants; "
                               "refusing to load them into an overridden engine")
    closed.preload(c_rec)
    if engine is not None:
        engine.preload(o_rec)
    return len(c_rec), len(o_rec) if engine is not None else 0


# -- output helpers -----------------------------------------------------------

def describe(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{format_rational(value)} ({float(value)!r})"


def _emit_report(report: object, fmt: str, out: TextIO) -> None:
    if fmt == "json":
        out.write(json.dumps(report, indent=1, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        out.write(_report_text(report) + "\n")


def _report_text(obj: object, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(_report_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(f"{pad}- {_inline(x)}" if _flat(x) or not isinstance(x, (dict, list))
                         else _report_text(x, indent) for x in obj)
    return pad + _inline(obj)


def _flat(v: object) -> bool:
    if isinstance(v, dict):
        return all(not isinstance(x, (dict, list)) for x in v.values())
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) for x in v)
    return True


def _inline(v: object) -> str:
    if isinstance(v, (dict, list)) and not v:
        return "none"
    if isinstance(v, dict):
        return ", ".join(f"{k}={_inline(x)}" for k, x in sorted(v.items()))
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


# -- argument parsing ---------------------------------------------------------

def _nonneg(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative: {n}")
    return n


def _positive(text: str) -> int:
    n = _nonneg(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


_BASIS_NAMES = {"0": 0, "1": 1, "2": 2, "3": 3, "d": DIAMOND, "diamond": DIAMOND}


def _basis(text: str) -> int:
    try:
        return _BASIS_NAMES[text.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(f"basis element must be one of {sorted(_BASIS_NAMES)}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chiang-ogw", description="Open and closed Gromov-Witten invariants "
                                "of CP^3 relative to the Chiang Lagrangian.")
    p.add_argument("--cache", default=os.environ.get(ENV_CACHE),
                   help=f"cache file (default: ${ENV_CACHE}); loaded before every command when it exists")
    p.add_argument("--beta-cap", type=_positive, default=DEFAULT_BETA_MAX, help="hard cap on beta")
    sub = p.add_subparsers(dest="command", required=True)

    inv = sub.add_parser("invariant", help="one open invariant")
    inv.add_argument("--beta", type=_nonneg, required=True)
    inv.add_argument("--k", type=_nonneg, default=0)
    for name in ("g0", "g1", "g2", "g3", "gd"):
        inv.add_argument(f"--{name}", type=_nonneg, default=0, help=f"number of {name} constraints")
    inv.add_argument("--v", type=_rational, help="override OGW_{1,0}(Gamma_2)")

    tab = sub.add_parser("table", help="boundary or interior table")
    tab.add_argument("kind", choices=["boundary", "interior"])
    tab.add_argument("--max-beta", type=_nonneg, default=16)
    tab.add_argument("--format", choices=["json", "csv", "md", "text"], default="text")
    tab.add_argument("--v", type=_rational, help="override OGW_{1,0}(Gamma_2)")

    clo = sub.add_parser("closed", help="GW_d(Delta_1^divisors, Delta_2^lines, Delta_3^points)")
    clo.add_argument("--degree", type=_nonneg, required=True)
    clo.add_argument("--lines", type=_nonneg, default=0)
    clo.add_argument("--points", type=_nonneg, default=0)
    clo.add_argument("--divisors", type=_nonneg, default=0)

    rq = sub.add_parser("rqc", help="small relative quantum cohomology")
    rq.add_argument("action", choices=["verify", "assoc", "multiply"])
    rq.add_argument("factors", nargs="*", type=_basis, help="basis elements 0,1,2,3,d for multiply")
    rq.add_argument("--format", choices=["json", "text"], default="text")

    an = sub.add_parser("analyze", help="audits and experiments")
    an.add_argument("action", choices=["denominators", "periodicity", "monotonicity", "pr-shift",
                                       "pr-certificate", "override", "search-v"])
    an.add_argument("--table", choices=["boundary", "interior"], default="boundary")
    an.add_argument("--max-beta", type=_nonneg)
    an.add_argument("--p", type=_rational, default=Fraction(-1, 4))
    an.add_argument("--v", type=_rational)
    an.add_argument("--M", type=_positive, default=4)
    an.add_argument("--numerator-bound", type=_nonneg, default=64)
    an.add_argument("--exponent-bound", type=_nonneg, default=8)
    an.add_argument("--mode", choices=["plain", "rigid"], default="plain", help="search-v candidate family")
    an.add_argument("--format", choices=["json", "text"], default="json")

    ca = sub.add_parser("cache", help="cache file maintenance")
    ca.add_argument("action", choices=["load", "store", "clear"])
    ca.add_argument("--max-beta", type=_positive, default=16,
                    help="for store: compute both tables up to this beta first")
    return p


class UsageError(Exception):
    pass


class _Context:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.closed = ClosedGW()
        self._engines: Dict[BasicInvariants, OpenGW] = {}
        self.cache_path = Path(args.cache) if args.cache else None

    def engine(self, v: Optional[Fraction] = None) -> OpenGW:
        basics = BasicInvariants() if v is None else BasicInvariants().with_v102(v)
        eng = self._engines.get(basics)
        if eng is None:
            eng = OpenGW(self.closed, basics, beta_max=self.args.beta_cap)
            if self.cache_path is not None and self.cache_path.exists():
                load_cache(self.cache_path, self.closed, eng if basics.is_default else None)
            self._engines[basics] = eng
        return eng

    def check_beta(self, beta: int) -> None:
        if beta > self.args.beta_cap:
            raise UsageError(f"beta {beta} exceeds the cap {self.args.beta_cap} (see --beta-cap)")


def _cmd_invariant(ctx: _Context, out: TextIO) -> int:
    a = ctx.args
    ctx.check_beta(a.beta)
    value = ctx.engine(a.v).value(a.beta, a.k, (a.g0, a.g1, a.g2, a.g3, a.gd))
    out.write(describe(value) + "\n")
    return EXIT_OK


def _cmd_table(ctx: _Context, out: TextIO) -> int:
    a = ctx.args
    if a.max_beta < 1:
        raise UsageError("--max-beta must be at least 1")
    ctx.check_beta(a.max_beta)
    build = analysis.boundary_table if a.kind == "boundary" else analysis.interior_table
    out.write(build(ctx.engine(a.v), a.max_beta).render(a.format))
    return EXIT_OK


def _cmd_closed(ctx: _Context, out: TextIO) -> int:
    a = ctx.args
    out.write(describe(ctx.closed.gw_counts(a.degree, 0, a.divisors, a.lines, a.points)) + "\n")
    return EXIT_OK


def _cmd_rqc(ctx: _Context, out: TextIO) -> int:
    a = ctx.args
    ring = QuantumRing(ctx.engine())
    if a.action == "multiply":
        if len(a.factors) < 1:
            raise UsageError("multiply needs at least one basis element")
        prod = QHElement.basis(a.factors[0])
        for f in a.factors[1:]:
            prod = ring.multiply(prod, QHElement.basis(f))
        if a.format == "json":
            out.write(json.dumps(prod.to_json(), ensure_ascii=False) + "\n")
        else:
            out.write(str(prod) + "\n")
        return EXIT_OK
    if a.factors:
        raise UsageError(f"rqc {a.action} takes no basis arguments")
    report = ring.verify_presentation() if a.action == "verify" else ring.associativity_check()
    if a.format == "json":
        out.write(json.dumps(report.to_json(), indent=1, ensure_ascii=False) + "\n")
    else:
        out.write(report.to_text(only_failures=a.action == "assoc") + "\n")
    return EXIT_OK if report.passed else EXIT_FAIL


def _cmd_analyze(ctx: _Context, out: TextIO) -> int:
    a = ctx.args
    act = a.action
    status = EXIT_OK
    if a.max_beta is not None:
        if a.max_beta < 1:
            raise UsageError("--max-beta must be at least 1")
        ctx.check_beta(a.max_beta)
    if act == "denominators":
        n = a.max_beta or (32 if a.table == "boundary" else 8)
        build = analysis.boundary_table if a.table == "boundary" else analysis.interior_table
        report = analysis.denominator_audit(build(ctx.engine(a.v), n))
        status = EXIT_OK if report["passed"] else EXIT_FAIL
    elif act == "periodicity":
        n = a.max_beta or 24
        if n < 9:
            raise UsageError("periodicity needs --max-beta >= 9")
        report = analysis.sign_periodicity(analysis.boundary_table(ctx.engine(a.v), n))
        status = EXIT_OK if report["passed"] else EXIT_FAIL
    elif act == "monotonicity":
        n = a.max_beta or 32
        report = {"max_beta": n,
                  "violations": analysis.monotonicity_violations(analysis.boundary_table(ctx.engine(a.v), n))}
    elif act == "pr-shift":
        n = a.max_beta or 8
        table = analysis.pr_shift(analysis.interior_table(ctx.engine(a.v), n), a.p, ctx.closed)
        report = {"p": format_rational(a.p), "rows": table.records()}
    elif act == "pr-certificate":
        report = analysis.pr_certificate(ctx.engine(a.v))
    elif act == "override":
        if a.v is None:
            raise UsageError("override needs --v")
        report = analysis.override_check(a.v, a.M, ctx.closed)
        status = EXIT_OK if report["passed"] else EXIT_FAIL
    else:
        found = analysis.v_search(a.numerator_bound, a.exponent_bound, a.M, ctx.closed, mode=a.mode)
        report = {"heuristic": True, "mode": a.mode, "M": a.M, "numerator_bound": a.numerator_bound,
                  "exponent_bound": a.exponent_bound, "candidates": [format_rational(v) for v in found]}
    _emit_report(report, a.format, out)
    return status


def _cmd_cache(ctx: _Context, out: TextIO) -> int:
    a = ctx.args
    path = ctx.cache_path
    if path is None:
        raise UsageError(f"no cache path: pass --cache or set ${ENV_CACHE}")
    if a.action == "clear":
        if path.exists():
            path.unlink()
        out.write(f"cleared {path}\n")
        return EXIT_OK
    if a.action == "load":
        if not path.exists():
            raise UsageError(f"cache file {path} does not exist")
        n_c, n_o = load_cache(path, ClosedGW(), OpenGW())
        out.write(f"{path}: {n_c} closed records, {n_o} open records\n")
        return EXIT_OK
    ctx.check_beta(a.max_beta)
    eng = ctx.engine()
    analysis.boundary_table(eng, a.max_beta)
    analysis.interior_table(eng, a.max_beta)
    store_cache(path, ctx.closed, eng)
    out.write(f"stored {len(ctx.closed.records())} closed and {len(eng.records())} open records in {path}\n")
    return EXIT_OK


_COMMANDS = {
    "invariant": _cmd_invariant,
    "table": _cmd_table,
    "closed": _cmd_closed,
    "rqc": _cmd_rqc,
    "analyze": _cmd_analyze,
    "cache": _cmd_cache,
}


_RATIONAL_FLAGS = ("--v", "--p")


def _fuse_negative_values(argv: List[str]) -> List[str]:
    """Turn ``--v -3/4`` into ``--v=-3/4``; argparse would read ``-3/4`` as a flag."""
    out: List[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _RATIONAL_FLAGS and i + 1 < len(argv) and argv[i + 1][:1] in ("-", "\u2212"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None,
         err: Optional[TextIO] = None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(_fuse_negative_values(sys.argv[1:] if argv is None else list(argv)))
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return _COMMANDS[args.command](_Context(args), out)
    except (UsageError, CacheFormatError, ValueError) as exc:
        err.write(f"chiang-ogw: error: {exc}\n")
        return EXIT_USAGE
    except (CyclicDependency, DivisorZero, WDVVReconstructionError) as exc:
        err.write(f"chiang-ogw: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
