"""Desk-scale elliptic demonstrators: periodic diagonal symbols and a 1-D
Dirichlet problem, plus cutoff-localized norms and the C^p conclusion.

Two exactly solvable models are used so every norm claim can be checked
against a closed form:

* a periodic operator diagonal in the coefficient basis, with symbol a(xi)
  elliptic of order 2q outside a finite zero set Z (Fredholm bookkeeping is
  exact: dim ker = dim coker = |Z|, index 0, independent of the weight); and
* the two-point problem -u'' = f on (0,1) with Dirichlet data, solved by an
  affine lift plus a sine expansion v^_k = f^_k / (pi k)^2.

Localization uses iterated raised-cosine tapers: the transition profile is
h(s) = (1 - cos(pi s))/2 composed ``order`` times, which joins the plateau
with C^(2^order - 1) smoothness, so taper-induced spectral tails stay far
below the aliasing audit threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iter_product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .errors import DomainError, PreconditionError
from .lattice import FrequencyLattice, SpectralElement, frequency_lattice
from .spectral import cp_constant, hnorm, synthesize
from .weights import ONE, RegularityIndex

__all__ = [
    "PeriodicEllipticOperator",
    "bracket_symbol",
    "laplacian_symbol",
    "PeriodicSolveReport",
    "solve_periodic",
    "apriori_constant",
    "Dirichlet1DProblem",
    "sine_coefficients",
    "Solution1D",
    "solve_dirichlet_1d",
    "CosineTaper",
    "LocalNormResult",
    "local_norm",
    "periodized_norm",
    "LocalRegularityReport",
    "local_regularity_experiment",
    "CpConclusionResult",
    "cp_conclusion_check",
]


class PeriodicEllipticOperator:
    """Diagonal periodic operator of even order 2q with symbol a(xi).

    ``zero_set`` collects the (finitely many) exact symbol zeros; ellipticity
    |a(xi)| >= c_ell <xi>^{2q} off the zero set is verified by enumeration.
    """

    def __init__(
        self,
        lattice: FrequencyLattice,
        order: int,
        symbol: np.ndarray,
        c_ell: Optional[float] = None,
    ):
        if order < 2 or order % 2:
            raise DomainError("operator order must be an even integer >= 2")
        symbol = np.asarray(symbol, dtype=np.complex128)
        if symbol.shape != (lattice.size,):
            raise DomainError("symbol must assign one value per lattice point")
        self.lattice = lattice
        self.order = int(order)
        self.symbol = symbol
        self.zero_mask = symbol == 0.0
        self.zero_set = [tuple(int(c) for c in row) for row in lattice.points[self.zero_mask]]
        off = ~self.zero_mask
        ratios = np.abs(symbol[off]) / lattice.brackets[off] ** order
        floor = float(ratios.min()) if off.any() else math.inf
        if c_ell is not None and floor < c_ell:
            raise PreconditionError(
                f"ellipticity floor violated: min |a|/<xi>^{order} = {floor:.6g} < {c_ell:g}"
            )
        self.c_ell = floor if c_ell is None else float(c_ell)
        self.symbol.setflags(write=False)

    @property
    def q(self) -> int:
        return self.order // 2

    def apply(self, u: SpectralElement) -> SpectralElement:
        if u.lattice != self.lattice:
            raise DomainError("element lives on a different lattice")
        return SpectralElement(self.lattice, self.symbol * u.coeffs)


def bracket_symbol(lattice: FrequencyLattice, q: int = 1) -> PeriodicEllipticOperator:
    """a(xi) = <xi>^{2q}: invertible, apriori constant exactly 1."""
    return PeriodicEllipticOperator(lattice, 2 * q, lattice.brackets ** (2 * q))


def laplacian_symbol(lattice: FrequencyLattice) -> PeriodicEllipticOperator:
    """a(xi) = |xi|^2: the periodic Laplacian, kernel = constants."""
    sq = (lattice.points.astype(float) ** 2).sum(axis=1)
    return PeriodicEllipticOperator(lattice, 2, sq)


@dataclass(frozen=True)
class PeriodicSolveReport:
    u: Optional[SpectralElement]
    compatible: bool
    defect: Tuple[Tuple[Tuple[int, ...], complex], ...]
    kernel_dim: int
    cokernel_dim: int
    index: int
    residual: float


def solve_periodic(
    A: PeriodicEllipticOperator, f: SpectralElement, *, compat_tol: float = 1e-12
) -> PeriodicSolveReport:
    """Exact diagonal solve u^ = f^/a off the zero set; Fredholm bookkeeping.

    f must vanish on the zero set within ``compat_tol``; otherwise the defect
    coefficients are listed and no solve is attempted.
    """
    if f.lattice != A.lattice:
        raise DomainError("right-hand side lives on a different lattice")
    kdim = len(A.zero_set)
    bad = A.zero_mask & (np.abs(f.coeffs) > compat_tol)
    if bad.any():
        defect = tuple(
            (tuple(int(c) for c in A.lattice.points[i]), complex(f.coeffs[i]))
            for i in np.nonzero(bad)[0]
        )
        return PeriodicSolveReport(None, False, defect, kdim, kdim, 0, math.nan)
    coeffs = np.zeros_like(f.coeffs)
    off = ~A.zero_mask
    coeffs[off] = f.coeffs[off] / A.symbol[off]
    u = SpectralElement(A.lattice, coeffs)
    fnorm = hnorm(f, ONE)
    residual = hnorm(A.apply(u) - f, ONE) / fnorm if fnorm > 0 else 0.0
    return PeriodicSolveReport(u, True, (), kdim, kdim, 0, residual)


def apriori_constant(A: PeriodicEllipticOperator, phi: RegularityIndex = None) -> float:
    """C = sup off the zero set of <xi>^{2q} / |a(xi)|.

    The weight in the a-priori inequality hnorm(u, phi) <= C hnorm(f, phi rho^{-2q})
    cancels exactly mode by mode, so C is computed in the cancelled form and is
    bit-identical for every phi (the argument is accepted only so call sites
    can record which weight the bound is quoted for).
    """
    off = ~A.zero_mask
    if not off.any():
        return 0.0
    return float(np.max(A.lattice.brackets[off] ** A.order / np.abs(A.symbol[off])))


@dataclass(frozen=True)
class Dirichlet1DProblem:
    """-u'' = f on (0,1), u(0) = g0, u(1) = g1 (order 2, boundary order 0)."""

    g0: float
    g1: float
    f_coeffs: Optional[np.ndarray] = None
    f_callable: Optional[Callable] = None
    breakpoints: Tuple[float, ...] = ()

    q = 1
    m = 0

    @classmethod
    def from_sine_coeffs(cls, coeffs, g0: float = 0.0, g1: float = 0.0) -> "Dirichlet1DProblem":
        return cls(g0=g0, g1=g1, f_coeffs=np.asarray(coeffs, dtype=float))

    @classmethod
    def from_callable(
        cls, f: Callable, g0: float = 0.0, g1: float = 0.0, breakpoints: Sequence[float] = ()
    ) -> "Dirichlet1DProblem":
        return cls(g0=g0, g1=g1, f_callable=f, breakpoints=tuple(float(b) for b in breakpoints))

    def f_values(self, x: np.ndarray) -> np.ndarray:
        if self.f_callable is not None:
            return np.asarray(self.f_callable(x), dtype=float)
        coeffs = self.f_coeffs
        k = np.arange(1, coeffs.size + 1)
        return np.sin(math.pi * np.outer(x, k)) @ coeffs


def sine_coefficients(f: Callable, modes: int, breakpoints: Sequence[float] = ()) -> np.ndarray:
    """f^_k = 2 int_0^1 f(x) sin(pi k x) dx via oscillatory-weight quadrature.

    Breakpoints split the integral so discontinuities never sit inside a
    quadrature panel.
    """
    edges = [0.0] + sorted(float(b) for b in breakpoints) + [1.0]
    out = np.empty(modes)
    for k in range(1, modes + 1):
        total = 0.0
        for a, b in zip(edges, edges[1:]):
            val, _ = integrate.quad(f, a, b, weight="sin", wvar=math.pi * k, limit=200)
            total += val
        out[k - 1] = 2.0 * total
    return out


@dataclass(frozen=True)
class Solution1D:
    """Affine lift g0 + (g1-g0) x plus the sine expansion of the zero-boundary part."""

    g0: float
    g1: float
    f_coeffs: np.ndarray
    v_coeffs: np.ndarray

    @property
    def modes(self) -> int:
        return self.v_coeffs.size

    def eval(self, x, modes: Optional[int] = None) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        coeffs = self.v_coeffs if modes is None else self.v_coeffs[:modes]
        out = self.g0 + (self.g1 - self.g0) * x
        k = np.arange(1, coeffs.size + 1)
        # cap the sine matrix at ~32 MB per chunk
        chunk = max(1, (1 << 22) // max(1, coeffs.size))
        flat = np.atleast_1d(x).ravel()
        acc = np.empty(flat.size)
        for lo in range(0, flat.size, chunk):
            acc[lo : lo + chunk] = np.sin(math.pi * np.outer(flat[lo : lo + chunk], k)) @ coeffs
        return out + acc.reshape(x.shape) if x.ndim else float(out + acc[0])

    def residual_report(self, problem: Dirichlet1DProblem, xs: np.ndarray) -> Dict[str, float]:
        """Truncation residual sup |S_M(f)(x) - f(x)| plus boundary mismatch."""
        k = np.arange(1, self.f_coeffs.size + 1)
        series = np.sin(math.pi * np.outer(xs, k)) @ self.f_coeffs
        resid = float(np.max(np.abs(series - problem.f_values(xs))))
        return {
            "interior_residual": resid,
            "boundary_mismatch": max(
                abs(self.eval(np.array(0.0)) - self.g0), abs(self.eval(np.array(1.0)) - self.g1)
            ),
        }


def solve_dirichlet_1d(problem: Dirichlet1DProblem, modes: int) -> Solution1D:
    """Spectral solve with ``modes`` sine modes; truncation is reported, not raised."""
    if problem.f_coeffs is not None:
        coeffs = np.zeros(modes)
        take = min(modes, problem.f_coeffs.size)
        coeffs[:take] = problem.f_coeffs[:take]
    else:
        coeffs = sine_coefficients(problem.f_callable, modes, problem.breakpoints)
    k = np.arange(1, modes + 1, dtype=float)
    v = coeffs / (math.pi * k) ** 2
    return Solution1D(g0=problem.g0, g1=problem.g1, f_coeffs=coeffs, v_coeffs=v)


@dataclass(frozen=True)
class CosineTaper:
    """Smooth bump supported on [a, b] with iterated raised-cosine transitions.

    The profile rises over [a, a+width], holds 1 on [a+width, b-width], and
    falls over [b-width, b].  ``order`` iterates the raised cosine; order nu
    gives C^(2^nu - 1) joins.
    """

    a: float
    b: float
    width: float
    order: int = 3

    def __post_init__(self):
        if not (0.0 < self.a < self.b < 1.0):
            raise DomainError("taper support must satisfy 0 < a < b < 1")
        if not (0.0 < self.width <= (self.b - self.a) / 2.0):
            raise DomainError("transition width must be positive and fit inside [a, b]")
        if self.order < 1:
            raise DomainError("taper order must be >= 1")

    def _ramp(self, s: np.ndarray) -> np.ndarray:
        s = np.clip(s, 0.0, 1.0)
        for _ in range(self.order):
            s = 0.5 - 0.5 * np.cos(math.pi * s)
        return s

    def eval(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        up = self._ramp((x - self.a) / self.width)
        down = self._ramp((self.b - x) / self.width)
        return up * down

    def __call__(self, x):
        return self.eval(x)


@dataclass(frozen=True)
class LocalNormResult:
    value: float
    sampling_points: int
    lattice_N: int
    last_octave_fraction: float
    reliable: bool


def _element_from_samples(values: np.ndarray) -> Tuple[SpectralElement, float]:
    """DFT of 2N periodic samples onto the lattice of truncation N-1.

    Coefficients follow the unit-period convention c_m = int_0^1 g e^{-2 pi i m x},
    so the phi = 1 norm of the element is the discrete L^2(0,1) norm of g.
    The Nyquist bin is dropped; the reported last-octave fraction is the
    aliasing audit statistic.
    """
    samples = values.size
    if samples % 2 or samples < 8:
        raise DomainError("need an even number >= 8 of samples")
    N = samples // 2
    c = np.fft.fft(values) / samples
    lat = frequency_lattice(1, N - 1)
    modes = lat.points[:, 0]
    coeffs = c[np.mod(modes, samples)]
    elem = SpectralElement(lat, coeffs)
    power = np.abs(coeffs) ** 2
    total = float(power.sum())
    if total == 0.0:
        return elem, 0.0
    octave = np.abs(modes) > (N - 1) // 2
    return elem, float(power[octave].sum() / total)


def local_norm(
    u_eval: Callable,
    taper: CosineTaper,
    phi: RegularityIndex,
    N: int,
    *,
    alias_tol: float = 1e-6,
) -> LocalNormResult:
    """Weighted norm of the periodized product taper * u at sampling resolution 2N."""
    x = np.arange(2 * N) / (2.0 * N)
    g = np.asarray(taper.eval(x) * np.asarray(u_eval(x), dtype=float))
    elem, frac = _element_from_samples(g)
    return LocalNormResult(
        value=hnorm(elem, phi),
        sampling_points=2 * N,
        lattice_N=N - 1,
        last_octave_fraction=frac,
        reliable=frac < alias_tol,
    )


def periodized_norm(
    u_eval: Callable, phi: RegularityIndex, N: int, *, alias_tol: float = 1e-6
) -> LocalNormResult:
    """Weighted norm of u periodized over [0,1) without a cutoff (seam included)."""
    x = np.arange(2 * N) / (2.0 * N)
    g = np.asarray(u_eval(x), dtype=float)
    elem, frac = _element_from_samples(g)
    return LocalNormResult(
        value=hnorm(elem, phi),
        sampling_points=2 * N,
        lattice_N=N - 1,
        last_octave_fraction=frac,
        reliable=frac < alias_tol,
    )


@dataclass(frozen=True)
class LocalRegularityReport:
    """Interior vs global norms across a resolution ladder.

    ``local_values[phi_label]`` and the global/control series are indexed by
    the rung.  Drift is |last/prev - 1| for the interior norms; growth rates
    are fitted slopes of ln(value) against ln(N).
    """

    N_ladder: Tuple[int, ...]
    local_values: Dict[str, Tuple[float, ...]]
    local_drift: Dict[str, float]
    global_values: Tuple[float, ...]
    global_log_rate: float
    control_values: Tuple[float, ...]
    control_log_rate: float
    unreliable_rungs: Tuple[int, ...]


def _log_rate(N_ladder, values) -> float:
    x = np.log(np.asarray(N_ladder, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def local_regularity_experiment(
    problem: Dirichlet1DProblem,
    interior: CosineTaper,
    control: CosineTaper,
    local_phis: Sequence[RegularityIndex],
    global_phi: RegularityIndex,
    N_ladder: Sequence[int],
    *,
    modes: Optional[int] = None,
) -> LocalRegularityReport:
    """Interior norms stabilize while the global periodized norm grows.

    The solution is expanded once with ``modes`` sine modes (default twice the
    finest rung) and held fixed; the ladder varies only the sampling
    resolution, so divergent norms show up as growth across rungs.
    """
    N_ladder = tuple(int(N) for N in N_ladder)
    modes = modes or 2 * max(N_ladder)
    solution = solve_dirichlet_1d(problem, modes)

    local_values: Dict[str, List[float]] = {p.describe(): [] for p in local_phis}
    global_values, control_values, unreliable = [], [], []
    for rung, N in enumerate(N_ladder):
        for p in local_phis:
            res = local_norm(solution.eval, interior, p, N)
            local_values[p.describe()].append(res.value)
            if not res.reliable:
                unreliable.append(rung)
        g = periodized_norm(solution.eval, global_phi, N)
        c = local_norm(solution.eval, control, global_phi, N)
        global_values.append(g.value)
        control_values.append(c.value)
    drift = {
        label: abs(vals[-1] / vals[-2] - 1.0) if len(vals) > 1 else 0.0
        for label, vals in local_values.items()
    }
    return LocalRegularityReport(
        N_ladder=N_ladder,
        local_values={k: tuple(v) for k, v in local_values.items()},
        local_drift=drift,
        global_values=tuple(global_values),
        global_log_rate=_log_rate(N_ladder, global_values),
        control_values=tuple(control_values),
        control_log_rate=_log_rate(N_ladder, control_values),
        unreliable_rungs=tuple(sorted(set(unreliable))),
    )


_DEFAULT_VERDICT_LADDERS = {
    1: tuple(2 ** k for k in range(7, 21)),
    2: tuple(2 ** k for k in range(4, 11)),
    3: tuple(2 ** k for k in range(3, 7)),
}


@dataclass(frozen=True)
class CpConclusionResult:
    passed: bool
    max_excess: float
    checks: int
    constants: Dict[int, float]  # K_{|alpha|} on the element's lattice


def cp_conclusion_check(
    u: SpectralElement,
    p: int,
    phi: RegularityIndex,
    *,
    x_samples: int = 8,
    seed: int = 0,
    verdict_ladder: Optional[Sequence[int]] = None,
    slack: float = 1e-9,
) -> CpConclusionResult:
    """Check sup |d^alpha u(x)| <= (2 pi)^{-n/2} K_{|alpha|} hnorm(u, phi) for |alpha| <= p.

    Refused (PreconditionError) unless the convergence verdict of the
    C^p constant for (phi, p) is "convergent" -- the hypothesis of the bound.
    """
    lat = u.lattice
    ladder = verdict_ladder or _DEFAULT_VERDICT_LADDERS[lat.n]
    report = cp_constant(phi, p, lat.n, ladder)
    if report.verdict != "convergent":
        raise PreconditionError(
            f"C^p criterion verdict is {report.verdict!r} for phi={phi.describe()}, p={p}"
        )
    w = np.asarray(phi.eval(lat.brackets), dtype=float)
    constants = {}
    for a_total in range(p + 1):
        t = lat.brackets ** a_total / w
        constants[a_total] = math.sqrt(math.fsum(t * t))
    norm = hnorm(u, phi)
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.0, 2.0 * math.pi, size=(x_samples, lat.n))
    max_excess = -math.inf
    checks = 0
    prefactor = (2.0 * math.pi) ** (-lat.n / 2.0)
    for alpha in iter_product(range(p + 1), repeat=lat.n):
        if sum(alpha) > p:
            continue
        bound = prefactor * constants[sum(alpha)] * norm
        for x in xs:
            value = abs(synthesize(u, alpha, x, max_order=max(p, 1)))
            max_excess = max(max_excess, value - bound)
            checks += 1
    return CpConclusionResult(
        passed=max_excess <= slack,
        max_excess=max_excess,
        checks=checks,
        constants=constants,
    )
