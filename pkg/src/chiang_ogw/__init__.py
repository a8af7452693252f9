"""Exact open and closed Gromov-Witten invariants of CP^3 relative to the
Chiang Lagrangian, the small relative quantum product they define, and the
table-level analyses built on them."""
from __future__ import annotations

from .closed_gw import ClosedGW, ClosedKey, WDVVReconstructionError
from .exact_arith import NovikovSeries, format_rational, parse_rational
from .open_gw import DIAMOND, BasicInvariants, CyclicDependency, DivisorZero, OpenGW, OpenKey
from .rqc import QHElement, QuantumRing

__all__ = [
    "ClosedGW",
    "ClosedKey",
    "WDVVReconstructionError",
    "NovikovSeries",
    "format_rational",
    "parse_rational",
    "DIAMOND",
    "BasicInvariants",
    "CyclicDependency",
    "DivisorZero",
    "OpenGW",
    "OpenKey",
    "QHElement",
    "QuantumRing",
]

__version__ = "0.1.0"
