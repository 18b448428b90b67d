"""Text grammar for weight and interpolation-parameter specifications.

Grammar (whitespace insensitive)::

    weight := unit { "*" unit } { rho }
    unit   := "pow(" REAL ")"            power factor t^s
            | "log(" REAL ")"            factor (1 + ln t)^r
            | "loglog(" REAL ")"         factor (1 + ln(1 + ln t))^k
            | "table(" PATH ["," REAL] ")"   tabulated weight from a
                                             two-column text file (t, phi(t));
                                             optional declared tail slope,
                                             default: slope of the last segment
    rho    := "rho(" REAL ")"            trailing shift suffix, multiplies by t^a

    psi    := weight
            | "thm5(" weight "," REAL "," REAL ")"   parameter built from a
                                                     weight between two
                                                     Sobolev orders (s0, s1)

Examples: ``pow(1.5)``, ``pow(2) * log(-3)``, ``pow(1)*log(1) rho(-0.5)``,
``table(phi.txt, 2.0)``, ``thm5(pow(1)*log(1), 0, 2)``.
"""

from __future__ import annotations

import os
from typing import List, Optional, Tuple

from .errors import GrammarError
from .weights import PowerLog, Product, RegularityIndex, Tabulated, rho_shift

__all__ = ["parse_weight", "parse_psi"]

_UNIT_NAMES = {"pow", "log", "loglog", "table", "rho", "thm5"}


def _scan_units(text: str) -> List[Tuple[str, str, int]]:
    """Split into (name, argument-string, position) units, tracking paren depth."""
    units = []
    i, n = 0, len(text)
    while i < n:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            break
        if units and text[i] == "*":
            i += 1
            while i < n and text[i].isspace():
                i += 1
            if i >= n:
                raise GrammarError("dangling '*'", text, n)
        start = i
        while i < n and (text[i].isalnum() or text[i] == "_"):
            i += 1
        name = text[start:i]
        if not name:
            raise GrammarError(f"expected a unit name, found {text[i]!r}", text, i)
        if name not in _UNIT_NAMES:
            raise GrammarError(f"unknown unit {name!r}", text, start)
        if i >= n or text[i] != "(":
            raise GrammarError(f"expected '(' after {name!r}", text, i)
        depth, j = 1, i + 1
        while j < n and depth:
            if text[j] == "(":
                depth += 1
            elif text[j] == ")":
                depth -= 1
            j += 1
        if depth:
            raise GrammarError("unbalanced parentheses", text, i)
        units.append((name, text[i + 1 : j - 1].strip(), start))
        i = j
    if not units:
        raise GrammarError("empty specification", text, 0)
    return units


def _real(argstr: str, text: str, pos: int) -> float:
    try:
        return float(argstr)
    except ValueError:
        raise GrammarError(f"expected a real number, got {argstr!r}", text, pos) from None


def _split_args(argstr: str) -> List[str]:
    parts, depth, cur = [], 0, []
    for ch in argstr:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur).strip())
    return parts


def _load_table(argstr: str, text: str, pos: int, base_dir: Optional[str]) -> Tabulated:
    args = _split_args(argstr)
    if len(args) not in (1, 2) or not args[0]:
        raise GrammarError("table() takes a path and an optional tail slope", text, pos)
    path = args[0].strip("'\"")
    if base_dir is not None and not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    slope = _real(args[1], text, pos) if len(args) == 2 else None
    try:
        return Tabulated.load(path, slope)
    except OSError as exc:
        raise GrammarError(f"cannot read table file: {exc}", text, pos) from None


def parse_weight(text: str, base_dir: Optional[str] = None) -> RegularityIndex:
    """Parse a weight specification string into a :class:`RegularityIndex`."""
    units = _scan_units(text)
    factors: List[RegularityIndex] = []
    shifts: List[float] = []
    for name, argstr, pos in units:
        if name == "thm5":
            raise GrammarError("thm5(...) is a parameter form, not a weight", text, pos)
        if name == "rho":
            shifts.append(_real(argstr, text, pos))
            continue
        if shifts:
            raise GrammarError("rho(...) must come last (it is a suffix)", text, pos)
        if name == "pow":
            factors.append(PowerLog(_real(argstr, text, pos)))
        elif name == "log":
            factors.append(PowerLog(0.0, _real(argstr, text, pos)))
        elif name == "loglog":
            factors.append(PowerLog(0.0, 0.0, _real(argstr, text, pos)))
        elif name == "table":
            factors.append(_load_table(argstr, text, pos, base_dir))
    if not factors:
        raise GrammarError("specification has no weight factors", text, 0)
    phi = factors[0] if len(factors) == 1 else Product(tuple(factors))
    for a in shifts:
        phi = rho_shift(phi, a)
    return phi


def parse_psi(text: str, base_dir: Optional[str] = None):
    """Parse a parameter specification into an :class:`InterpolationParameter`.

    Plain weight expressions act as psi(tau) (clamped to their t=1 value for
    tau < 1); a pure power becomes an exact power parameter; ``thm5(w,s0,s1)``
    invokes :func:`sobscale.interpolation.parameter_from_weight`.
    """
    from . import interpolation

    stripped = text.strip()
    if stripped.startswith("thm5"):
        units = _scan_units(stripped)
        if len(units) != 1:
            raise GrammarError("thm5(...) cannot be combined with other units", text, 0)
        _, argstr, pos = units[0]
        args = _split_args(argstr)
        if len(args) != 3:
            raise GrammarError("thm5() takes (weight, s0, s1)", text, pos)
        phi = parse_weight(args[0], base_dir)
        return interpolation.parameter_from_weight(
            phi, _real(args[1], text, pos), _real(args[2], text, pos)
        )
    w = parse_weight(stripped, base_dir)
    if isinstance(w, PowerLog) and w.log_exp == 0.0 and w.loglog_exp == 0.0:
        return interpolation.power_parameter(w.power)
    return interpolation.weight_parameter(w)
