"""Boundary trace, minimal-norm extension, and trace-norm equivalence on lattices.

The boundary of the n-dimensional lattice is the (n-1)-dimensional lattice of
leading coordinates xi'; the fiber over xi' is the line {(xi', xi_n)}.  The
trace of u is h^(xi') = sum_{xi_n} u^(xi', xi_n) (restriction to the
hyperplane x_n = 0 in coefficient form).

For a weight phi the per-mode mass

    S(xi') = sum_{|xi_n| <= N} phi^{-2}(<(xi', xi_n)>)

controls everything: the minimal extension of h places
u^ = h^ * phi^{-2}(<xi>) / S(xi') on each fiber (the exact one-parameter
Lagrange minimizer), its squared norm is sum |h^|^2 / S, and the two-sided
comparison with the boundary weight (phi * rho^{-1/2})^2 = phi^2(<xi'>)/<xi'>
is captured by the per-mode ratio

    r(xi') = <xi'> / (S(xi') * phi^2(<xi'>)).

When the lower index of phi exceeds 1/2 the ratio band stabilizes along an
N ladder; at or below 1/2 the masses S diverge and the band degenerates.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateExtensionWarning, DomainError, LatticeMismatchError
from .lattice import FrequencyLattice, SpectralElement, frequency_lattice
from .spectral import hnorm
from .weights import RegularityIndex, rho_shift

__all__ = [
    "boundary_of",
    "fiber_slices",
    "boundary_trace",
    "boundary_mass",
    "boundary_masses",
    "minimal_extension",
    "TraceEquivalenceReport",
    "trace_equivalence_report",
    "FixedExtensionTable",
    "fixed_extension_operator",
    "lower_index",
]

# Boundary data is a spectral element on the (n-1)-dimensional lattice; the
# boundary norm under a weight eta is hnorm(h, eta) with brackets <xi'>.


def boundary_of(lattice: FrequencyLattice) -> FrequencyLattice:
    if lattice.n < 2:
        raise DomainError("a 1-dimensional lattice has no boundary sub-lattice")
    return frequency_lattice(lattice.n - 1, lattice.N)


@lru_cache(maxsize=32)
def _fiber_index(n: int, N: int) -> Tuple[np.ndarray, np.ndarray]:
    """Full-lattice row indices grouped by boundary mode, xi_n ascending.

    Returns (order, starts): ``order`` lists full-lattice rows fiber by fiber
    in boundary canonical order; fiber b occupies order[starts[b]:starts[b+1]].
    """
    full = frequency_lattice(n, N)
    bnd = frequency_lattice(n - 1, N)
    bidx = np.empty(full.size, dtype=np.int64)
    lookup = {tuple(int(c) for c in row): i for i, row in enumerate(bnd.points)}
    for i, row in enumerate(full.points):
        bidx[i] = lookup[tuple(int(c) for c in row[:-1])]
    order = np.lexsort((full.points[:, -1], bidx))
    starts = np.searchsorted(bidx[order], np.arange(bnd.size + 1))
    return order, starts


def fiber_slices(lattice: FrequencyLattice) -> Tuple[FrequencyLattice, List[np.ndarray]]:
    """Boundary lattice plus, per boundary mode, the fiber's full-lattice rows."""
    bnd = boundary_of(lattice)
    order, starts = _fiber_index(lattice.n, lattice.N)
    return bnd, [order[starts[b] : starts[b + 1]] for b in range(bnd.size)]


def boundary_trace(u: SpectralElement) -> SpectralElement:
    """h^(xi') = sum over the fiber of u^(xi', xi_n); requires n >= 2."""
    bnd, fibers = fiber_slices(u.lattice)
    out = np.empty(bnd.size, dtype=np.complex128)
    for b, rows in enumerate(fibers):
        vals = u.coeffs[rows]
        out[b] = complex(math.fsum(vals.real), math.fsum(vals.imag))
    return SpectralElement(bnd, out)


def _fiber_brackets(xi_prime, N: int) -> np.ndarray:
    xi_prime = np.atleast_1d(np.asarray(xi_prime, dtype=float))
    k = np.arange(-N, N + 1, dtype=float)
    return np.sqrt(1.0 + float(np.dot(xi_prime, xi_prime)) + k * k)


def boundary_mass(xi_prime, phi: RegularityIndex, N: int) -> float:
    """S(xi') = sum over |xi_n| <= N of phi^{-2}(<(xi', xi_n)>)."""
    w = np.asarray(phi.eval(_fiber_brackets(xi_prime, N)), dtype=float)
    return math.fsum(w ** -2.0)


def boundary_masses(phi: RegularityIndex, lattice: FrequencyLattice) -> np.ndarray:
    """All S(xi') in boundary canonical order (deterministic per-fiber sums)."""
    bnd, fibers = fiber_slices(lattice)
    w = np.asarray(phi.eval(lattice.brackets), dtype=float)
    inv2 = w ** -2.0
    return np.array([math.fsum(inv2[rows]) for rows in fibers])


def lower_index(phi: RegularityIndex) -> float:
    """sigma0 of phi: exact for the closed family, estimated midpoint otherwise."""
    e = phi.powerlog_exponents()
    if e is not None:
        return e[0]
    from .estimation import matuszewska_estimate

    return matuszewska_estimate(phi).sigma0_estimate


def minimal_extension(
    h: SpectralElement, phi: RegularityIndex, lattice: FrequencyLattice
) -> SpectralElement:
    """The extension of h with the smallest phi-norm (exact per-fiber minimizer).

    Its trace reproduces h and its squared norm is sum |h^(xi')|^2 / S(xi').
    Below lower index 1/2 the masses S diverge with N and the extension norm
    degenerates; a warning is emitted in that regime.
    """
    bnd, fibers = fiber_slices(lattice)
    if h.lattice != bnd:
        raise LatticeMismatchError(f"boundary data on {h.lattice}, expected {bnd}")
    if lower_index(phi) <= 0.5:
        warnings.warn(
            f"lower index of {phi.describe()} is <= 1/2; extension norms degenerate with N",
            DegenerateExtensionWarning,
            stacklevel=2,
        )
    w = np.asarray(phi.eval(lattice.brackets), dtype=float)
    inv2 = w ** -2.0
    out = np.zeros(lattice.size, dtype=np.complex128)
    for b, rows in enumerate(fibers):
        S = math.fsum(inv2[rows])
        out[rows] = h.coeffs[b] * inv2[rows] / S
    return SpectralElement(lattice, out)


@dataclass(frozen=True)
class TraceEquivalenceReport:
    """Per-mode equivalence ratios r(xi') across an N ladder.

    ``rows`` holds (N, xi' csv-string, S, r) tuples; ``sup_r``/``inf_r`` the
    band per rung; ``mass_at_zero`` tracks S(0) growth, and
    ``mass_growth_slope`` fits S(0) against ln N (positive slope = unbounded
    mass, the degeneration trend for lower index <= 1/2).
    """

    phi_label: str
    n: int
    N_ladder: Tuple[int, ...]
    sup_r: Tuple[float, ...]
    inf_r: Tuple[float, ...]
    mass_at_zero: Tuple[float, ...]
    mass_growth_slope: float
    inf_r_decay_factors: Tuple[float, ...]
    rows: Tuple[Tuple[int, str, float, float], ...]


def trace_equivalence_report(
    phi: RegularityIndex, n: int, N_ladder: Sequence[int]
) -> TraceEquivalenceReport:
    """Compute r(xi') = <xi'> / (S(xi') phi^2(<xi'>)) bands across the ladder."""
    N_ladder = tuple(int(N) for N in N_ladder)
    sup_r, inf_r, mass0, rows = [], [], [], []
    for N in N_ladder:
        lat = frequency_lattice(n, N)
        bnd, _ = fiber_slices(lat)
        S = boundary_masses(phi, lat)
        a = bnd.brackets
        wb = np.asarray(phi.eval(a), dtype=float)
        r = a / (S * wb * wb)
        sup_r.append(float(r.max()))
        inf_r.append(float(r.min()))
        mass0.append(float(S[0]))  # xi' = 0 is first in canonical order
        for b in range(bnd.size):
            xi = ",".join(str(int(c)) for c in bnd.points[b])
            rows.append((N, xi, float(S[b]), float(r[b])))
    logN = np.log(np.asarray(N_ladder, dtype=float))
    slope = float(np.polyfit(logN, np.asarray(mass0), 1)[0]) if len(N_ladder) > 1 else 0.0
    decay = tuple(
        float(inf_r[i] / inf_r[i + 1]) if inf_r[i + 1] > 0 else math.inf
        for i in range(len(N_ladder) - 1)
    )
    return TraceEquivalenceReport(
        phi_label=phi.describe(),
        n=n,
        N_ladder=N_ladder,
        sup_r=tuple(sup_r),
        inf_r=tuple(inf_r),
        mass_at_zero=tuple(mass0),
        mass_growth_slope=slope,
        inf_r_decay_factors=decay,
        rows=tuple(rows),
    )


@dataclass(frozen=True)
class FixedExtensionTable:
    """Boundedness ratios of one fixed extension measured under several targets."""

    reference_label: str
    N_ladder: Tuple[int, ...]
    entries: Tuple[dict, ...]  # {"target", "included", "note", "ratios"}


def _embed_boundary(h: SpectralElement, bnd: FrequencyLattice) -> SpectralElement:
    """Zero-pad boundary data onto a larger boundary lattice."""
    if h.lattice == bnd:
        return h
    out = np.zeros(bnd.size, dtype=np.complex128)
    for i, row in enumerate(h.lattice.points):
        out[bnd.index_of(row)] = h.coeffs[i]
    return SpectralElement(bnd, out)


def fixed_extension_operator(
    h: SpectralElement,
    phi_ref: RegularityIndex,
    targets: Sequence[RegularityIndex],
    n: int,
    N_ladder: Sequence[int],
) -> FixedExtensionTable:
    """Extend h once under phi_ref per rung, then measure every target weight.

    The ratio per (target, N) is the extension's target norm divided by the
    (target * rho^{-1/2})-weighted boundary norm of h.  Targets whose lower
    index is at or below 1/2 are excluded with a note (their boundary weight
    comparison degenerates).  For h = 0 all ratios are defined as 0.
    """
    N_ladder = tuple(int(N) for N in N_ladder)
    entries = []
    extensions = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateExtensionWarning)
        for N in N_ladder:
            lat = frequency_lattice(n, N)
            hN = _embed_boundary(h, boundary_of(lat))
            extensions[N] = (lat, hN, minimal_extension(hN, phi_ref, lat))
    for target in targets:
        if lower_index(target) <= 0.5:
            entries.append(
                {
                    "target": target.describe(),
                    "included": False,
                    "note": "excluded: lower index <= 1/2",
                    "ratios": (),
                }
            )
            continue
        boundary_weight = rho_shift(target, -0.5)
        ratios = []
        for N in N_ladder:
            lat, hN, ext = extensions[N]
            denom = hnorm(hN, boundary_weight)
            ratios.append(hnorm(ext, target) / denom if denom > 0 else 0.0)
        entries.append(
            {
                "target": target.describe(),
                "included": True,
                "note": "",
                "ratios": tuple(ratios),
            }
        )
    return FixedExtensionTable(
        reference_label=phi_ref.describe(), N_ladder=N_ladder, entries=tuple(entries)
    )
