"""Exact Walsh-Hadamard analysis of indicator functions.

The table stores the integers ``W_A(xi) = sum_{x in A} (-1)^{xi . x}``; the
normalised Fourier coefficient is ``W_A(xi) / 2^n``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionTooLarge, EmptySet, ZeroFrequency
from .gf2 import DenseSet, GF2Vector, parities

NAIVE_MAX_DIM = 14
_NAIVE_CHUNK = 1 << 22  # entries of the character matrix per block


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along the last axis (int64)."""
    a = np.array(values, dtype=np.int64)
    size = a.shape[-1]
    n = size.bit_length() - 1
    if size != 1 << n:
        raise ValueError("transform length must be a power of two")
    lead = a.shape[:-1]
    h = 1
    for _ in range(n):
        a = a.reshape(*lead, size // (2 * h), 2, h)
        lo = a[..., 0, :]
        hi = a[..., 1, :]
        a = np.stack((lo + hi, lo - hi), axis=-2)
        h *= 2
    return a.reshape(*lead, size)


@dataclass(frozen=True, eq=False)
class FourierTable:
    dim: int
    source_cardinality: int
    walsh: np.ndarray

    def __getitem__(self, xi: int) -> int:
        return int(self.walsh[int(xi)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FourierTable):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.source_cardinality == other.source_cardinality
            and bool(np.array_equal(self.walsh, other.walsh))
        )

    def coefficient(self, xi: int) -> Fraction:
        """The normalised coefficient 1_A^(xi)."""
        return Fraction(self[xi], 1 << self.dim)

    def plancherel_holds(self) -> bool:
        return plancherel_sum(self) == (1 << self.dim) * self.source_cardinality

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["xi", "walsh"])
        for xi, value in enumerate(self.walsh):
            writer.writerow([xi, int(value)])
        return buf.getvalue()


def walsh_transform(a: DenseSet) -> FourierTable:
    w = fwht(a.occupancy.astype(np.int64))
    w.setflags(write=False)
    return FourierTable(a.dim, a.cardinality, w)


def naive_walsh_batch(occupancies: np.ndarray) -> np.ndarray:
    """Literal double sum ``sum_x (-1)^{xi.x} 1_A(x)`` for a batch of sets.

    ``occupancies`` has shape (m, 2^n).  The character matrix is materialised
    in row blocks and applied with a float32 matrix product; every partial sum
    is an integer of magnitude <= 2^n < 2^24, so the float arithmetic is exact.
    """
    occ = np.atleast_2d(np.asarray(occupancies))
    size = occ.shape[-1]
    n = size.bit_length() - 1
    if n > NAIVE_MAX_DIM:
        raise DimensionTooLarge(f"naive transform is an oracle for n <= {NAIVE_MAX_DIM}")
    x = occ.astype(np.float32).T
    xs = np.arange(size, dtype=np.int64)
    out = np.empty((occ.shape[0], size), dtype=np.int64)
    rows = max(1, _NAIVE_CHUNK // size)
    for start in range(0, size, rows):
        xi = xs[start : start + rows]
        chars = 1.0 - 2.0 * (np.bitwise_count(xi[:, None] & xs[None, :]) & 1).astype(np.float32)
        out[:, start : start + rows] = np.rint(chars @ x).T.astype(np.int64)
    return out


def naive_walsh(a: DenseSet) -> FourierTable:
    if a.dim > NAIVE_MAX_DIM:
        raise DimensionTooLarge(f"naive transform is an oracle for n <= {NAIVE_MAX_DIM}")
    w = naive_walsh_batch(a.occupancy[None, :])[0]
    w.setflags(write=False)
    return FourierTable(a.dim, a.cardinality, w)


@dataclass(frozen=True)
class SpectrumThreshold:
    """An exact threshold alpha given by ``alpha ** power == value``.

    ``power`` is a power of two; ``power == 2`` is the usual alpha-squared
    encoding.  Thresholds such as ``1/sqrt(2K)`` with ``K`` only known through
    ``K^2`` or ``K^4`` need ``power`` 4 or 8.
    """

    value: Fraction
    power: int = 2

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", Fraction(self.value))
        if self.power < 1 or self.power & (self.power - 1):
            raise ValueError("power must be a power of two")
        if not 0 < self.value <= 1:
            raise ValueError(f"threshold must lie in (0, 1], got alpha^{self.power} = {self.value}")

    @classmethod
    def of(cls, alpha: Fraction | int | str) -> "SpectrumThreshold":
        alpha = Fraction(alpha)
        return cls(alpha * alpha, 2)

    def squared_float(self) -> float:
        """alpha^2 as a float (for prefiltering only)."""
        return float(self.value) ** (2.0 / self.power)

    def admits(self, walsh_value: int, cardinality: int) -> bool:
        """Exact test of |walsh| >= alpha * |A|."""
        p = self.power
        lhs = abs(int(walsh_value)) ** p * self.value.denominator
        return lhs >= self.value.numerator * int(cardinality) ** p

    def __le__(self, other: "SpectrumThreshold") -> bool:
        p = max(self.power, other.power)
        return self.value ** (p // self.power) <= other.value ** (p // other.power)

    def __str__(self) -> str:
        return f"alpha^{self.power}={self.value}"


NINE_TENTHS = SpectrumThreshold(Fraction(81, 100), 2)
EIGHT_TENTHS = SpectrumThreshold(Fraction(64, 100), 2)

_BAND = 1e-9


def spectrum_mask(table: FourierTable, alpha: SpectrumThreshold) -> np.ndarray:
    """Boolean mask of Spec_alpha(A), decided exactly.

    Entries far from the boundary are settled by a float comparison of
    w^2 / |A|^2 (both exact integers below 2^53); entries within a relative
    band of 1e-9 are re-decided with integer arithmetic.
    """
    if table.source_cardinality == 0:
        raise EmptySet("spectrum of the empty set")
    card = table.source_cardinality
    w = table.walsh
    ratio = (w.astype(np.float64) ** 2) / float(card * card)
    t = alpha.squared_float()
    mask = ratio >= t * (1.0 + _BAND)
    unsure = np.flatnonzero((ratio > t * (1.0 - _BAND)) & ~mask)
    for xi in unsure:
        mask[xi] = alpha.admits(int(w[xi]), card)
    return mask


def spectrum(a: DenseSet | FourierTable, alpha: SpectrumThreshold) -> list[int]:
    table = a if isinstance(a, FourierTable) else walsh_transform(a)
    if table.source_cardinality == 0:
        raise EmptySet("spectrum of the empty set")
    return [int(x) for x in np.flatnonzero(spectrum_mask(table, alpha))]


def zero_hyperplane_proportion(a: DenseSet, xi: int) -> Fraction:
    """Proportion of A lying in {x : xi . x = 0}."""
    hits = int(np.count_nonzero(parities(a.elements(), xi) == 0))
    return Fraction(hits, a.cardinality)


def bias_check(a: DenseSet, xi: int | GF2Vector, alpha: SpectrumThreshold) -> bool:
    """Whether the share of A in xi^perp lies outside ((1-alpha)/2, (1+alpha)/2).

    Equivalent to membership of xi in Spec_alpha(A): |2p - 1| >= alpha where p
    is the share.  Decided exactly as (2p-1)^power >= alpha^power.
    """
    xi = int(xi)
    if xi == 0:
        raise ZeroFrequency("bias along the zero frequency")
    if a.cardinality == 0:
        raise EmptySet("bias of the empty set")
    share = zero_hyperplane_proportion(a, xi)
    return abs(2 * share - 1) ** alpha.power >= alpha.value


def plancherel_sum(table: FourierTable) -> int:
    return int(np.dot(table.walsh, table.walsh))
