"""Regularity indices: the weight functions of the extended Sobolev scale.

A regularity index is a positive function on [1, oo) used to weight spectral
coefficients.  The closed family implemented here is

    t^s * (1 + ln t)^r * (1 + ln(1 + ln t))^k

together with finite products and real powers of such factors, plus tabulated
weights interpolated log-log linearly.  For the closed family the lower and
upper Matuszewska indices coincide with the aggregate power exponent ``s``
(logarithmic factors contribute zero), so index arithmetic is exact.

All node types are immutable; evaluation is deterministic (same tree, same
inputs, bit-identical outputs) and accepts scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import DomainError

__all__ = [
    "RegularityIndex",
    "PowerLog",
    "Product",
    "PowerOf",
    "Tabulated",
    "ComposedWeight",
    "ONE",
    "matuszewska_exact",
    "rho_shift",
    "ratio_index",
]


def _checked_argument(t):
    """Coerce to float array, enforcing the domain t >= 1."""
    arr = np.asarray(t, dtype=float)
    if arr.size and float(np.min(arr)) < 1.0:
        raise DomainError("regularity indices are defined for t >= 1 only")
    return arr


def _match_shape(values: np.ndarray, t) -> "np.ndarray | float":
    if np.ndim(t) == 0:
        return float(values)
    return values


class RegularityIndex:
    """Base class for weight-function expression trees."""

    kind = "abstract"

    def eval(self, t):
        """Evaluate the weight at ``t`` (scalar or array), ``t >= 1``."""
        raise NotImplementedError

    def __call__(self, t):
        return self.eval(t)

    def powerlog_exponents(self) -> Optional[Tuple[float, float, float]]:
        """Aggregate (power, log, loglog) exponents, or None outside the closed family."""
        return None

    def is_closed_family(self) -> bool:
        return self.powerlog_exponents() is not None

    def describe(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.describe()}>"


@dataclass(frozen=True)
class PowerLog(RegularityIndex):
    """t^power * (1+ln t)^log_exp * (1+ln(1+ln t))^loglog_exp."""

    power: float
    log_exp: float = 0.0
    loglog_exp: float = 0.0

    kind = "powerlog"

    def eval(self, t):
        x = _checked_argument(t)
        out = np.power(x, self.power)
        if self.log_exp != 0.0:
            out = out * np.power(1.0 + np.log(x), self.log_exp)
        if self.loglog_exp != 0.0:
            out = out * np.power(1.0 + np.log1p(np.log(x)), self.loglog_exp)
        return _match_shape(out, t)

    def powerlog_exponents(self):
        return (self.power, self.log_exp, self.loglog_exp)

    def describe(self):
        parts = [f"pow({self.power:g})"]
        if self.log_exp:
            parts.append(f"log({self.log_exp:g})")
        if self.loglog_exp:
            parts.append(f"loglog({self.loglog_exp:g})")
        return " * ".join(parts)


@dataclass(frozen=True)
class Product(RegularityIndex):
    """Pointwise product of regularity indices."""

    factors: Tuple[RegularityIndex, ...]

    kind = "product"

    def __post_init__(self):
        if not self.factors:
            raise DomainError("empty product")

    def eval(self, t):
        x = _checked_argument(t)
        out = self.factors[0].eval(x)
        for f in self.factors[1:]:
            out = out * f.eval(x)
        return _match_shape(np.asarray(out, dtype=float), t)

    def powerlog_exponents(self):
        total = np.zeros(3)
        for f in self.factors:
            e = f.powerlog_exponents()
            if e is None:
                return None
            total += e
        return tuple(total)

    def describe(self):
        return " * ".join(f.describe() for f in self.factors)


@dataclass(frozen=True)
class PowerOf(RegularityIndex):
    """A regularity index raised to a real exponent."""

    base: RegularityIndex
    exponent: float

    kind = "powerof"

    def eval(self, t):
        x = _checked_argument(t)
        return _match_shape(np.power(self.base.eval(x), self.exponent), t)

    def powerlog_exponents(self):
        e = self.base.powerlog_exponents()
        if e is None:
            return None
        return tuple(self.exponent * np.asarray(e))

    def describe(self):
        return f"({self.base.describe()})^{self.exponent:g}"


@dataclass(frozen=True)
class Tabulated(RegularityIndex):
    """Strictly positive samples on [1, T_max], interpolated log-log linearly.

    Evaluation beyond ``t_max`` extrapolates with the declared log-log slope;
    it never raises, but :meth:`extrapolated_mask` lets callers flag such
    evaluations in reports.
    """

    log_t: Tuple[float, ...]
    log_phi: Tuple[float, ...]
    extrapolation_slope: float

    kind = "tabulated"

    @classmethod
    def from_samples(cls, ts, values, extrapolation_slope: float) -> "Tabulated":
        ts = np.asarray(ts, dtype=float)
        values = np.asarray(values, dtype=float)
        if ts.ndim != 1 or ts.shape != values.shape or ts.size < 2:
            raise DomainError("tabulated weight needs matching 1-d sample arrays, >= 2 points")
        if not np.all(np.diff(ts) > 0):
            raise DomainError("tabulated abscissae must be strictly increasing")
        if ts[0] > 1.0:
            raise DomainError("tabulated grid must start at t = 1")
        if not np.all(values > 0):
            raise DomainError("tabulated weight values must be strictly positive")
        tab = cls(tuple(np.log(ts)), tuple(np.log(values)), float(extrapolation_slope))
        # positivity audit on a dense grid (log-log interpolation of positive
        # samples is positive, but the invariant is checked, not assumed)
        audit = np.exp(np.linspace(0.0, float(np.log(ts[-1])), 512))
        if not np.all(np.asarray(tab.eval(audit)) > 0):
            raise DomainError("tabulated weight audit found a non-positive value")
        return tab

    @classmethod
    def load(cls, path, extrapolation_slope: Optional[float] = None) -> "Tabulated":
        """Read a two-column numeric text file (t, phi(t)); t strictly increasing.

        Without a declared extrapolation slope, the slope of the last table
        segment is used.
        """
        data = np.loadtxt(path, dtype=float, ndmin=2)
        if data.shape[1] != 2:
            raise DomainError(f"expected two columns in {path!s}, got {data.shape[1]}")
        if extrapolation_slope is None:
            lt = np.log(data[-2:, 0])
            lp = np.log(data[-2:, 1])
            extrapolation_slope = float((lp[1] - lp[0]) / (lt[1] - lt[0]))
        return cls.from_samples(data[:, 0], data[:, 1], extrapolation_slope)

    @property
    def t_max(self) -> float:
        return float(np.exp(self.log_t[-1]))

    def eval(self, t):
        x = _checked_argument(t)
        lx = np.log(x)
        lt = np.asarray(self.log_t)
        lp = np.asarray(self.log_phi)
        out = np.interp(lx, lt, lp)
        beyond = lx > lt[-1]
        if np.any(beyond):
            out = np.where(beyond, lp[-1] + self.extrapolation_slope * (lx - lt[-1]), out)
        return _match_shape(np.exp(out), t)

    def extrapolated_mask(self, t):
        x = _checked_argument(t)
        return np.asarray(np.log(x) > self.log_t[-1])

    def describe(self):
        return f"table[{len(self.log_t)} pts, t_max={self.t_max:g}, tail slope {self.extrapolation_slope:g}]"


@dataclass(frozen=True)
class ComposedWeight(RegularityIndex):
    """Black-box positive weight wrapped as a regularity index.

    Used for composed expressions (e.g. phi0 * psi(phi1/phi0)) that leave the
    closed family.  Exact index arithmetic is unavailable; callers estimate.
    """

    fn: Callable
    label: str

    kind = "composed"

    def eval(self, t):
        x = _checked_argument(t)
        return _match_shape(np.asarray(self.fn(x), dtype=float), t)

    def describe(self):
        return self.label


ONE = PowerLog(0.0)


def matuszewska_exact(phi: RegularityIndex) -> Tuple[float, float]:
    """Exact (lower, upper) Matuszewska indices for closed-family weights.

    Both indices equal the aggregate power exponent; log and loglog factors
    contribute zero.  Tabulated or black-box weights are redirected to
    :func:`sobscale.estimation.matuszewska_estimate`.
    """
    e = phi.powerlog_exponents()
    if e is None:
        raise DomainError(
            f"exact indices are unavailable for {phi.kind} weights; "
            "use matuszewska_estimate instead"
        )
    return (e[0], e[0])


def rho_shift(phi: RegularityIndex, a: float) -> RegularityIndex:
    """Multiply by t^a in closed form; both indices shift by exactly ``a``."""
    if isinstance(phi, PowerLog):
        return PowerLog(phi.power + a, phi.log_exp, phi.loglog_exp)
    if isinstance(phi, Product):
        return Product(phi.factors + (PowerLog(a),))
    return Product((phi, PowerLog(a)))


def ratio_index(phi1: RegularityIndex, phi0: RegularityIndex) -> RegularityIndex:
    """Pointwise quotient phi1/phi0 with exact index arithmetic when closed."""
    if isinstance(phi1, PowerLog) and isinstance(phi0, PowerLog):
        return PowerLog(
            phi1.power - phi0.power,
            phi1.log_exp - phi0.log_exp,
            phi1.loglog_exp - phi0.loglog_exp,
        )
    return Product((phi1, PowerOf(phi0, -1.0)))
