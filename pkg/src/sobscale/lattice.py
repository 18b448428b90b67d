"""Truncated frequency lattices and spectral elements.

A :class:`FrequencyLattice` enumerates xi in Z^n with |xi_j| <= N in the
canonical order: ascending |xi|^2, ties broken lexicographically by
components.  The order is the contract for every reduction in the package;
sums over lattice points are performed in canonical order with exactly
rounded (compensated) summation, so results are reproducible bit-for-bit.

Serialization formats (stable, versioned):

* text, one element per file::

      # spectral-element v1 n=<n> N=<N>
      <xi_1> ... <xi_n> <Re> <Im>          (one row per point, canonical order,
                                            floats printed with %.17g)

* binary, little-endian::

      magic   8 bytes  b"SSPECEL1"
      version u16      1
      n       u16
      N       u32
      count   u64      must equal (2N+1)^n
      payload count * 2 float64   interleaved (Re, Im), canonical order
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Tuple

import numpy as np

from .errors import DomainError, LatticeMismatchError

__all__ = [
    "bracket",
    "FrequencyLattice",
    "frequency_lattice",
    "SpectralElement",
    "random_element",
    "save_text",
    "load_text",
    "save_binary",
    "load_binary",
]

_MAGIC = b"SSPECEL1"
_VERSION = 1


def bracket(xi) -> float:
    """Japanese bracket <xi> = (1 + |xi|^2)^(1/2); >= 1, equality iff xi = 0."""
    arr = np.asarray(xi, dtype=float)
    return float(math.sqrt(1.0 + float(np.dot(arr.ravel(), arr.ravel()))))


class FrequencyLattice:
    """Canonical enumeration of {xi in Z^n : |xi_j| <= N}.

    Instances are immutable (arrays are read-only) and cached per (n, N);
    use :func:`frequency_lattice` to obtain them.
    """

    def __init__(self, n: int, N: int):
        if not (1 <= n <= 3):
            raise DomainError("lattice dimension must be 1, 2, or 3")
        if N < 1:
            raise DomainError("truncation radius must be a positive integer")
        self.n = int(n)
        self.N = int(N)
        axes = [np.arange(-N, N + 1, dtype=np.int64)] * n
        grid = np.meshgrid(*axes, indexing="ij")
        points = np.stack([g.ravel() for g in grid], axis=1)
        sq = (points.astype(np.float64) ** 2).sum(axis=1)
        order = np.lexsort(tuple(points[:, j] for j in range(n - 1, -1, -1)) + (sq,))
        self.points = points[order]
        self.brackets = np.sqrt(1.0 + sq[order])
        self.points.setflags(write=False)
        self.brackets.setflags(write=False)
        self._index: Dict[Tuple[int, ...], int] = {}

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def index_of(self, xi) -> int:
        """Position of a lattice point in the canonical enumeration."""
        if not self._index:
            self._index.update(
                (tuple(int(c) for c in row), i) for i, row in enumerate(self.points)
            )
        key = tuple(int(c) for c in np.atleast_1d(xi))
        if key not in self._index:
            raise DomainError(f"{key} is not a point of this lattice")
        return self._index[key]

    def __eq__(self, other):
        return isinstance(other, FrequencyLattice) and (self.n, self.N) == (other.n, other.N)

    def __hash__(self):
        return hash((self.n, self.N))

    def __repr__(self):
        return f"FrequencyLattice(n={self.n}, N={self.N}, size={self.size})"


@lru_cache(maxsize=64)
def frequency_lattice(n: int, N: int) -> FrequencyLattice:
    return FrequencyLattice(n, N)


@dataclass(frozen=True, eq=False)
class SpectralElement:
    """Complex coefficient vector indexed by a frequency lattice."""

    lattice: FrequencyLattice
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.lattice.size,):
            raise LatticeMismatchError(
                f"coefficient count {c.shape} does not match lattice size {self.lattice.size}"
            )
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def require_same_lattice(self, other: "SpectralElement") -> None:
        if self.lattice != other.lattice:
            raise LatticeMismatchError(f"{self.lattice} vs {other.lattice}")

    def __add__(self, other: "SpectralElement") -> "SpectralElement":
        self.require_same_lattice(other)
        return SpectralElement(self.lattice, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralElement") -> "SpectralElement":
        self.require_same_lattice(other)
        return SpectralElement(self.lattice, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "SpectralElement":
        return SpectralElement(self.lattice, self.coeffs * scalar)

    __rmul__ = __mul__

    @classmethod
    def zeros(cls, lattice: FrequencyLattice) -> "SpectralElement":
        return cls(lattice, np.zeros(lattice.size, dtype=np.complex128))

    @classmethod
    def single_mode(cls, lattice: FrequencyLattice, xi, value=1.0) -> "SpectralElement":
        c = np.zeros(lattice.size, dtype=np.complex128)
        c[lattice.index_of(xi)] = value
        return cls(lattice, c)


def random_element(lattice: FrequencyLattice, rng: np.random.Generator) -> SpectralElement:
    """Standard complex Gaussian coefficients; deterministic given the generator state."""
    c = rng.standard_normal(lattice.size) + 1j * rng.standard_normal(lattice.size)
    return SpectralElement(lattice, c)


def save_text(elem: SpectralElement, path) -> None:
    lat = elem.lattice
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# spectral-element v1 n={lat.n} N={lat.N}\n")
        for row, c in zip(lat.points, elem.coeffs):
            coords = " ".join(str(int(v)) for v in row)
            fh.write(f"{coords} {c.real:.17g} {c.imag:.17g}\n")


def load_text(path) -> SpectralElement:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if header[:2] != ["#", "spectral-element"] or header[2] != "v1":
            raise DomainError(f"not a v1 spectral-element text file: {path!s}")
        n = int(header[3].split("=")[1])
        N = int(header[4].split("=")[1])
        lat = frequency_lattice(n, N)
        coords = np.empty((lat.size, n), dtype=np.int64)
        coeffs = np.empty(lat.size, dtype=np.complex128)
        for i in range(lat.size):
            parts = fh.readline().split()
            if len(parts) != n + 2:
                raise DomainError(f"malformed row {i} in {path!s}")
            coords[i] = [int(p) for p in parts[:n]]
            coeffs[i] = complex(float(parts[n]), float(parts[n + 1]))
    if not np.array_equal(coords, lat.points):
        raise DomainError(f"rows of {path!s} are not in canonical order")
    return SpectralElement(lat, coeffs)


def save_binary(elem: SpectralElement, path) -> None:
    lat = elem.lattice
    header = _MAGIC + struct.pack("<HHIQ", _VERSION, lat.n, lat.N, lat.size)
    interleaved = np.empty(2 * lat.size, dtype="<f8")
    interleaved[0::2] = elem.coeffs.real
    interleaved[1::2] = elem.coeffs.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(interleaved.tobytes())


def load_binary(path) -> SpectralElement:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:8] != _MAGIC:
        raise DomainError(f"bad magic in {path!s}")
    version, n, N, count = struct.unpack("<HHIQ", blob[8:24])
    if version != _VERSION:
        raise DomainError(f"unsupported spectral-element version {version}")
    lat = frequency_lattice(n, N)
    if count != lat.size:
        raise DomainError(f"count {count} does not match lattice size {lat.size}")
    interleaved = np.frombuffer(blob, dtype="<f8", offset=24)
    if interleaved.size != 2 * count:
        raise DomainError(f"truncated payload in {path!s}")
    return SpectralElement(lat, interleaved[0::2] + 1j * interleaved[1::2])
