"""Interpolation with a function parameter for weighted spectral pairs.

A regular pair (H^{phi0}, H^{phi1}) on a lattice (phi0/phi1 bounded, so the
second space embeds in the first) has the diagonal generator J with spectrum
j(xi) = phi1(<xi>)/phi0(<xi>) -- the unique positive operator mapping the
pair isometrically.  For a positive function psi on (0, oo), the
intermediate norm is

    ||u||_psi = ( sum phi0^2(<xi>) psi^2(j(xi)) |u^(xi)|^2 )^(1/2).

Two lattice identities are verified to machine precision by this module:

* transplanting a weight phi onto the Sobolev pair (t^{s0}, t^{s1}) via
  psi(tau) = tau^{-s0/(s1-s0)} phi(tau^{1/(s1-s0)}) reproduces the phi-norm
  exactly (j(xi) = <xi>^{s1-s0} >= 1 makes the two weights identical); and
* reiteration: the psi-interpolated norm of a weighted pair equals the norm
  with weight phi0 * psi(phi1/phi0).

The interpolation-parameter criterion (equivalence to a concave function) is
certified by a finite quasi-concavity audit: the smallest sampled C with
psi(t)/psi(s) <= C * max(1, t/s).  This is a necessary, grid-checkable
surrogate; full equivalence-to-concavity is not decidable from samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple, Union

import numpy as np

from .errors import DomainError, PreconditionError
from .lattice import FrequencyLattice, SpectralElement, random_element
from .spectral import embedding_decision, hnorm
from .weights import (
    ComposedWeight,
    PowerLog,
    PowerOf,
    Product,
    RegularityIndex,
    ratio_index,
)

__all__ = [
    "PsiFunction",
    "PowerPsi",
    "WeightPsi",
    "TransplantPsi",
    "PseudoconcavityAudit",
    "pseudoconcavity_constant",
    "PsiCertification",
    "InterpolationParameter",
    "power_parameter",
    "weight_parameter",
    "parameter_from_weight",
    "admissible_sobolev_pair",
    "HilbertPairModel",
    "interp_norm",
    "verify_sobolev_identity",
    "ReiterationResult",
    "verify_reiteration",
    "OperatorTestStats",
    "operator_interpolation_test",
]


class PsiFunction:
    """Positive function on (0, oo) usable as an interpolation parameter."""

    kind = "abstract"

    def eval(self, tau):
        raise NotImplementedError

    def __call__(self, tau):
        return self.eval(tau)

    def describe(self) -> str:
        raise NotImplementedError


def _positive_tau(tau) -> np.ndarray:
    arr = np.asarray(tau, dtype=float)
    if arr.size and float(np.min(arr)) <= 0.0:
        raise DomainError("psi is defined on (0, oo) only")
    return arr


@dataclass(frozen=True)
class PowerPsi(PsiFunction):
    """psi(tau) = tau^theta."""

    theta: float

    kind = "power"

    def eval(self, tau):
        arr = _positive_tau(tau)
        out = np.power(arr, self.theta)
        return float(out) if np.ndim(tau) == 0 else out

    def describe(self):
        return f"tau^{self.theta:g}"


@dataclass(frozen=True)
class WeightPsi(PsiFunction):
    """A weight expression used as psi; clamped to its t=1 value for tau < 1.

    Weights are defined on [1, oo); the clamp keeps psi bounded on segments
    without changing it on the lattice spectrum (where j >= 1 whenever the
    pair orders strictly increase).
    """

    weight: RegularityIndex

    kind = "weight"

    def eval(self, tau):
        arr = _positive_tau(tau)
        flat = np.atleast_1d(arr)
        out = np.empty_like(flat)
        below = flat < 1.0
        if below.any():
            out[below] = self.weight.eval(1.0)
        if (~below).any():
            out[~below] = self.weight.eval(flat[~below])
        out = out.reshape(arr.shape)
        return float(out) if np.ndim(tau) == 0 else out

    def describe(self):
        return self.weight.describe()


@dataclass(frozen=True)
class TransplantPsi(PsiFunction):
    """psi(tau) = tau^{-s0/(s1-s0)} phi(tau^{1/(s1-s0)}) for tau >= 1, phi(1) below."""

    phi: RegularityIndex
    s0: float
    s1: float

    kind = "transplant"

    def eval(self, tau):
        arr = _positive_tau(tau)
        d = self.s1 - self.s0
        flat = np.atleast_1d(arr)
        out = np.empty_like(flat)
        below = flat < 1.0
        if below.any():
            out[below] = self.phi.eval(1.0)
        if (~below).any():
            ge = flat[~below]
            out[~below] = np.power(ge, -self.s0 / d) * np.asarray(
                self.phi.eval(np.power(ge, 1.0 / d)), dtype=float
            )
        out = out.reshape(arr.shape)
        return float(out) if np.ndim(tau) == 0 else out

    def describe(self):
        return f"transplant({self.phi.describe()}; {self.s0:g}, {self.s1:g})"


@dataclass(frozen=True)
class PseudoconcavityAudit:
    """Quasi-concavity certificate over a finite log grid.

    ``constant`` is the smallest sampled C with psi(t)/psi(s) <= C max(1, t/s);
    ``ok`` is False when the prefix constants grow without bound across grid
    decades (then psi is not an interpolation parameter at this grid).
    """

    constant: float
    ok: bool
    prefix_constants: Tuple[float, ...]
    grid: Tuple[float, float, int]


def pseudoconcavity_constant(
    psi: Union[PsiFunction, "InterpolationParameter"],
    grid: Tuple[float, float, int] = (1.0, 1e6, 241),
    *,
    growth_threshold: float = 2.0,
) -> PseudoconcavityAudit:
    """Audit quasi-concavity of psi on a log-spaced grid [r, t_max]."""
    r, t_max, points = grid
    g = np.exp(np.linspace(math.log(r), math.log(t_max), int(points)))
    vals = np.asarray(psi.eval(g), dtype=float)
    if not np.all(vals > 0):
        raise DomainError("psi must be positive on the audit grid")
    # Q[i, j] = psi(g[j]) / (psi(g[i]) * max(1, g[j]/g[i]))
    growth = np.maximum(1.0, g[None, :] / g[:, None])
    Q = (vals[None, :] / vals[:, None]) / growth
    decades = np.floor(np.log10(g) - math.log10(r) + 1e-12).astype(int)
    prefix = []
    for d in range(int(decades.max()) + 1):
        m = int(np.searchsorted(decades, d, side="right"))
        prefix.append(float(Q[:m, :m].max()))
    constant = float(Q.max())
    growing = len(prefix) >= 3 and all(
        nxt >= prev * growth_threshold for prev, nxt in zip(prefix[1:], prefix[2:])
    )
    return PseudoconcavityAudit(
        constant=constant, ok=not growing, prefix_constants=tuple(prefix), grid=grid
    )


@dataclass(frozen=True)
class PsiCertification:
    pseudoconcavity_constant: float
    quasi_concave: bool
    bounded_on_segments: bool
    separated_from_zero: bool
    audit_grid: Tuple[float, float, int]
    note: str = ""


@dataclass(frozen=True)
class InterpolationParameter:
    """A psi evaluator together with its certification record."""

    psi: PsiFunction
    certification: PsiCertification

    def eval(self, tau):
        return self.psi.eval(tau)

    def __call__(self, tau):
        return self.psi.eval(tau)

    def describe(self) -> str:
        return self.psi.describe()


def _certify(psi: PsiFunction, grid=(1.0, 1e6, 241), note: str = "") -> InterpolationParameter:
    audit = pseudoconcavity_constant(psi, grid)
    g = np.exp(np.linspace(math.log(grid[0]), math.log(grid[1]), int(grid[2])))
    vals = np.asarray(psi.eval(g), dtype=float)
    cert = PsiCertification(
        pseudoconcavity_constant=audit.constant,
        quasi_concave=audit.ok,
        bounded_on_segments=bool(np.all(np.isfinite(vals))),
        separated_from_zero=bool(vals.min() >= 1e-12 * max(1.0, float(vals[0]))),
        audit_grid=grid,
        note=note,
    )
    return InterpolationParameter(psi=psi, certification=cert)


def power_parameter(theta: float) -> InterpolationParameter:
    return _certify(PowerPsi(theta))


def weight_parameter(weight: RegularityIndex) -> InterpolationParameter:
    return _certify(WeightPsi(weight))


def admissible_sobolev_pair(
    phi: RegularityIndex, s0: float, s1: float
) -> Tuple[bool, str]:
    """Check that (s0, s1) brackets the indices of phi, with attainment provisos.

    For closed-family weights the index equals the power exponent s and the
    endpoint s0 = s (resp. s1 = s) is admissible only when the translation
    ratio stays bounded below (resp. above) there, which happens exactly when
    the leading log exponent points the right way.  Tabulated weights cannot
    be resolved by sampling and are reported indeterminate.
    """
    if not s0 < s1:
        return False, "need s0 < s1"
    e = phi.powerlog_exponents()
    if e is None:
        return True, "indeterminate (non-closed-family weight)"
    s, r, k = e
    lower_attained = (r > 0) or (r == 0 and k >= 0)
    upper_attained = (r < 0) or (r == 0 and k <= 0)
    if s0 > s or (s0 == s and not lower_attained):
        return False, f"lower side violated: s0={s0:g} vs index {s:g} (attained={lower_attained})"
    if s1 < s or (s1 == s and not upper_attained):
        return False, f"upper side violated: s1={s1:g} vs index {s:g} (attained={upper_attained})"
    return True, "exact"


def parameter_from_weight(
    phi: RegularityIndex, s0: float, s1: float, grid=(1.0, 1e6, 241)
) -> InterpolationParameter:
    """Build the certified parameter transplanting phi onto the pair (s0, s1)."""
    ok, reason = admissible_sobolev_pair(phi, s0, s1)
    if not ok:
        raise PreconditionError(f"(s0, s1) not admissible for {phi.describe()}: {reason}")
    note = "" if reason == "exact" else reason
    return _certify(TransplantPsi(phi, float(s0), float(s1)), grid, note=note)


class HilbertPairModel:
    """Regular weighted pair on a lattice with its diagonal generator spectrum."""

    def __init__(self, lattice: FrequencyLattice, phi0: RegularityIndex, phi1: RegularityIndex):
        decision = embedding_decision(phi0, phi1)
        if not decision.embedded:
            raise PreconditionError(
                f"pair is not regular: embedding decision is {decision.outcome!r}"
            )
        self.lattice = lattice
        self.phi0 = phi0
        self.phi1 = phi1
        self.embedding = decision
        self.w0 = np.asarray(phi0.eval(lattice.brackets), dtype=float)
        self.w1 = np.asarray(phi1.eval(lattice.brackets), dtype=float)
        self.j_spectrum = self.w1 / self.w0
        if not np.all(self.j_spectrum > 0):
            raise PreconditionError("generator spectrum must be positive")
        iso = np.max(np.abs(self.w0 * self.j_spectrum - self.w1) / self.w1)
        if iso > 1e-13:
            raise PreconditionError(f"generator does not map the pair isometrically ({iso:.3e})")

    def __repr__(self):
        return (
            f"HilbertPairModel({self.lattice!r}, {self.phi0.describe()}, {self.phi1.describe()})"
        )


def interp_norm(
    u: SpectralElement,
    pair: HilbertPairModel,
    psi: Union[PsiFunction, InterpolationParameter],
) -> float:
    """||psi(J) u|| in the base norm: (sum phi0^2 psi^2(j) |u^|^2)^(1/2)."""
    if u.lattice != pair.lattice:
        raise DomainError("element and pair live on different lattices")
    psi_vals = np.asarray(psi.eval(pair.j_spectrum), dtype=float)
    if not np.all(psi_vals > 0) or not np.all(np.isfinite(psi_vals)):
        raise DomainError("psi is non-positive or non-finite on the generator spectrum")
    t = pair.w0 * psi_vals * np.abs(u.coeffs)
    return math.sqrt(math.fsum(t * t))


def verify_sobolev_identity(
    phi: RegularityIndex,
    s0: float,
    s1: float,
    lattice: FrequencyLattice,
    samples: int = 50,
    seed: int = 0,
) -> float:
    """Max relative deviation between the transplanted pair norm and the phi-norm.

    On the lattice the two norms agree identically; the returned deviation is
    pure floating-point noise and must sit at machine precision.
    """
    pair = HilbertPairModel(lattice, PowerLog(s0), PowerLog(s1))
    param = parameter_from_weight(phi, s0, s1)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        u = random_element(lattice, rng)
        a = hnorm(u, phi)
        b = interp_norm(u, pair, param)
        worst = max(worst, abs(a - b) / a)
    return worst


@dataclass(frozen=True)
class ReiterationResult:
    max_deviation: float
    phi: RegularityIndex
    index_bracket: Tuple[float, float]
    certified: bool
    warning: str = ""


def verify_reiteration(
    phi0: RegularityIndex,
    phi1: RegularityIndex,
    param: InterpolationParameter,
    lattice: FrequencyLattice,
    samples: int = 50,
    seed: int = 0,
) -> ReiterationResult:
    """Compare the psi-interpolated pair norm against the composed weight norm.

    The composed weight is phi = phi0 * psi(phi1/phi0); for a power psi and
    closed-family inputs it is built in closed form (exact indices), otherwise
    as a black-box composition with numerically estimated indices.  An
    uncertified psi downgrades the result to warning-grade instead of failing.
    """
    pair = HilbertPairModel(lattice, phi0, phi1)
    warning = ""
    if not param.certification.quasi_concave:
        warning = "psi failed the quasi-concavity audit; result is warning-grade"

    psi = param.psi
    if isinstance(psi, PowerPsi) and phi0.is_closed_family() and phi1.is_closed_family():
        composed: RegularityIndex = Product(
            (phi0, PowerOf(ratio_index(phi1, phi0), psi.theta))
        )
        e = composed.powerlog_exponents()
        bracket = (e[0], e[0])
    else:
        ratio = ratio_index(phi1, phi0)
        composed = ComposedWeight(
            fn=lambda t, _r=ratio, _p0=phi0, _ps=psi: np.asarray(_p0.eval(t), dtype=float)
            * np.asarray(_ps.eval(np.asarray(_r.eval(t), dtype=float)), dtype=float),
            label=f"{phi0.describe()} * psi({phi1.describe()} / {phi0.describe()})",
        )
        from .estimation import matuszewska_estimate

        est = matuszewska_estimate(composed)
        bracket = (est.sigma0_lo, est.sigma1_hi)

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        u = random_element(lattice, rng)
        a = hnorm(u, composed)
        b = interp_norm(u, pair, param)
        worst = max(worst, abs(a - b) / a)
    return ReiterationResult(
        max_deviation=worst,
        phi=composed,
        index_bracket=bracket,
        certified=param.certification.quasi_concave,
        warning=warning,
    )


@dataclass(frozen=True)
class OperatorTestStats:
    trials: int
    theta: Optional[float]
    heinz_violations: int
    max_heinz_excess: float
    max_ratio_general: float
    ratio_violations: int
    c_bound: float


def weighted_operator_norm(matrix: np.ndarray, weights: np.ndarray) -> float:
    """Operator norm on the weighted space: largest singular value of W A W^{-1}."""
    scaled = (weights[:, None] * matrix) / weights[None, :]
    return float(np.linalg.svd(scaled, compute_uv=False)[0])


def random_shift_multiplier_operator(
    lattice: FrequencyLattice, rng: np.random.Generator, *, max_terms: int = 4, max_shift: int = 3
) -> np.ndarray:
    """Random sum of frequency-shift convolutions composed with multipliers."""
    m = lattice.size
    A = np.zeros((m, m), dtype=np.complex128)
    n_terms = int(rng.integers(1, max_terms + 1))
    for _ in range(n_terms):
        shift = rng.integers(-max_shift, max_shift + 1, size=lattice.n)
        coeff = complex(rng.standard_normal(), rng.standard_normal())
        mult = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        targets = lattice.points + shift
        inside = np.all(np.abs(targets) <= lattice.N, axis=1)
        for src in np.nonzero(inside)[0]:
            dst = lattice.index_of(targets[src])
            A[dst, src] += coeff * mult[dst]
    return A


def operator_interpolation_test(
    pair: HilbertPairModel,
    param: InterpolationParameter,
    trials: int,
    *,
    seed: int = 0,
    c_bound: float = 10.0,
    heinz_slack: float = 1e-9,
    max_modes: int = 200,
) -> OperatorTestStats:
    """Exact dense operator norms on H0, H1, H_psi for random shift/multiplier mixes.

    For a power parameter tau^theta the Heinz-type bound
    ||T||_psi <= ||T||_0^{1-theta} ||T||_1^{theta} is asserted with the given
    slack; for a general certified psi the ratio against max(||T||_0, ||T||_1)
    is recorded and compared with the configured empirical bound.

    Per-trial generators derive deterministically from (seed, trial), so the
    trials are order-independent and parallelizable without changing results.
    """
    lat = pair.lattice
    if lat.size > max_modes:
        raise PreconditionError(
            f"lattice has {lat.size} modes; dense operator norms capped at {max_modes}"
        )
    psi_vals = np.asarray(param.eval(pair.j_spectrum), dtype=float)
    w_psi = pair.w0 * psi_vals
    theta = param.psi.theta if isinstance(param.psi, PowerPsi) else None

    heinz_violations = 0
    ratio_violations = 0
    max_excess = -math.inf
    max_ratio = 0.0
    for trial in range(trials):
        rng = np.random.default_rng((seed, trial))
        A = random_shift_multiplier_operator(lat, rng)
        n0 = weighted_operator_norm(A, pair.w0)
        n1 = weighted_operator_norm(A, pair.w1)
        npsi = weighted_operator_norm(A, w_psi)
        if n0 == 0.0 and n1 == 0.0:
            continue
        if theta is not None:
            bound = n0 ** (1.0 - theta) * n1 ** theta
            excess = npsi / bound - 1.0
            max_excess = max(max_excess, excess)
            if excess > heinz_slack:
                heinz_violations += 1
        ratio = npsi / max(n0, n1)
        max_ratio = max(max_ratio, ratio)
        if ratio > c_bound:
            ratio_violations += 1
    return OperatorTestStats(
        trials=trials,
        theta=theta,
        heinz_violations=heinz_violations,
        max_heinz_excess=max_excess,
        max_ratio_general=max_ratio,
        ratio_violations=ratio_violations,
        c_bound=c_bound,
    )
