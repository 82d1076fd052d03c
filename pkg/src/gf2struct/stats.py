"""Sumsets, doubling constants and additive-quadruple counts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod

import numpy as np

from .errors import CertificateViolation, TooLarge
from .exact import KParam, ceil_root, format_rational
from .fourier import FourierTable, fwht, walsh_transform
from .gf2 import DenseSet, require_nonempty

BRUTE_ENERGY_LIMIT = 10**8

_LIMB = 24
_BLOCK = 1 << 14


def _blocked_sum(x: np.ndarray) -> int:
    # int64 block sums stay below 2^62 when |x| <= 2^48
    pad = (-x.size) % _BLOCK
    if pad:
        x = np.concatenate([x, np.zeros(pad, dtype=np.int64)])
    return sum(int(s) for s in x.reshape(-1, _BLOCK).sum(axis=1))


def exact_dot(a: np.ndarray, b: np.ndarray) -> int:
    """Exact integer dot product of int64 arrays with entries bounded by 2^48."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    mask = (1 << _LIMB) - 1
    a_hi, a_lo = a >> _LIMB, a & mask
    b_hi, b_lo = b >> _LIMB, b & mask
    hh = _blocked_sum(a_hi * b_hi)
    mixed = _blocked_sum(a_hi * b_lo) + _blocked_sum(a_lo * b_hi)
    ll = _blocked_sum(a_lo * b_lo)
    return (hh << (2 * _LIMB)) + (mixed << _LIMB) + ll


def representation_counts(a: DenseSet, b: DenseSet) -> np.ndarray:
    """r(x) = |{(a, b) in A x B : a + b = x}| for every x."""
    require_nonempty(a, b)
    wa = walsh_transform(a).walsh
    wb = walsh_transform(b).walsh
    return fwht(wa * wb) >> a.dim


def sumset(a: DenseSet, b: DenseSet) -> DenseSet:
    return DenseSet(a.dim, representation_counts(a, b) > 0)


@dataclass(frozen=True)
class DoublingValue:
    """Dbl(A, B) = |A+B| / sqrt(|A||B|), carried as the exact triple."""

    sumset_size: int
    size_a: int
    size_b: int

    @property
    def squared(self) -> Fraction:
        return Fraction(self.sumset_size**2, self.size_a * self.size_b)

    def __float__(self) -> float:
        return float(self.squared) ** 0.5

    def as_k(self) -> KParam:
        return KParam.from_square(self.squared)

    def satisfies_bounds(self) -> bool:
        """Dbl >= 1 and Dbl^-2 |A| <= |B| <= Dbl^2 |A|, exactly."""
        sq = self.squared
        return sq >= 1 and self.size_a <= sq * self.size_b and self.size_b <= sq * self.size_a

    def to_json(self) -> dict:
        return {
            "sumset_size": self.sumset_size,
            "sizes": [self.size_a, self.size_b],
            "dbl_squared": format_rational(self.squared),
            "dbl": float(self),
        }


def doubling(a: DenseSet, b: DenseSet) -> DoublingValue:
    require_nonempty(a, b)
    return DoublingValue(sumset(a, b).cardinality, a.cardinality, b.cardinality)


@dataclass(frozen=True)
class EnergyValue:
    """Quadruple count with the four set sizes; omega = count / prod(sizes)^(3/4)."""

    quadruple_count: int
    sizes: tuple[int, int, int, int]

    @property
    def size_product(self) -> int:
        return prod(self.sizes)

    @property
    def omega(self) -> float:
        return self.quadruple_count / float(self.size_product) ** 0.75

    def omega_fourth(self) -> Fraction:
        """omega^4 as an exact rational."""
        return Fraction(self.quadruple_count**4, self.size_product**3)

    def inverse(self) -> KParam:
        """1/omega as a K parameter (requires a positive count)."""
        if self.quadruple_count == 0:
            raise ZeroDivisionError("omega is zero")
        return KParam(Fraction(self.size_product**3, self.quadruple_count**4))

    def inverse_ceiling(self, denominator: int = 100) -> Fraction:
        """Smallest multiple of 1/denominator that is >= 1/omega."""
        return Fraction(ceil_root(denominator**4 * self.inverse().fourth, 4), denominator)

    def at_least_inverse(self, k: KParam) -> bool:
        """Exact test of omega >= 1/K, i.e. count^4 K^4 >= prod^3."""
        return self.quadruple_count**4 * k.fourth >= self.size_product**3

    def within_unit_interval(self) -> bool:
        c = self.quadruple_count
        s = self.sizes
        return c >= 0 and all(c * s[j] <= self.size_product for j in range(4))

    def compare(self, other: "EnergyValue") -> int:
        """Sign of omega(self) - omega(other), exactly."""
        lhs = self.quadruple_count**4 * other.size_product**3
        rhs = other.quadruple_count**4 * self.size_product**3
        return (lhs > rhs) - (lhs < rhs)

    def to_json(self) -> dict:
        return {
            "quadruple_count": self.quadruple_count,
            "sizes": list(self.sizes),
            "omega_fourth": format_rational(self.omega_fourth()),
            "omega": self.omega,
        }


def energy_from_tables(tables: tuple[FourierTable, ...]) -> EnergyValue:
    """Count via sum_xi prod_i W_i(xi) = 2^n * count."""
    if len(tables) != 4:
        raise ValueError("energy needs four tables")
    w1, w2, w3, w4 = (t.walsh for t in tables)
    n = tables[0].dim
    total = exact_dot(w1 * w2, w3 * w4)
    count, rem = divmod(total, 1 << n)
    if rem:
        raise ArithmeticError("Fourier energy identity produced a non-integer count")
    return EnergyValue(count, tuple(t.source_cardinality for t in tables))


def energy(a1: DenseSet, a2: DenseSet, a3: DenseSet, a4: DenseSet) -> EnergyValue:
    require_nonempty(a1, a2, a3, a4)
    return energy_from_tables(tuple(walsh_transform(s) for s in (a1, a2, a3, a4)))


def brute_energy(a1: DenseSet, a2: DenseSet, a3: DenseSet, a4: DenseSet) -> int:
    """Count a1 + a2 + a3 in A4 by direct enumeration; the oracle for energy()."""
    require_nonempty(a1, a2, a3, a4)
    if a1.cardinality * a2.cardinality * a3.cardinality > BRUTE_ENERGY_LIMIT:
        raise TooLarge("brute-force energy is limited to |A1||A2||A3| <= 1e8")
    pairs = (a2.elements()[:, None] ^ a3.elements()[None, :]).ravel()
    occ4 = a4.occupancy
    return sum(int(np.count_nonzero(occ4[pairs ^ x])) for x in a1.elements())


def pair_energy(a: DenseSet) -> int:
    """Quadruple count of (A, A, A, A) from the histogram of pairwise sums.

    count = sum_x r(x)^2 with r(x) = |{(a, b) : a + b = x}| tallied directly
    over all |A|^2 pairs; an oracle independent of the Fourier route.
    """
    require_nonempty(a)
    if a.cardinality**2 > BRUTE_ENERGY_LIMIT:
        raise TooLarge("pair-histogram energy is limited to |A|^2 <= 1e8")
    xs = a.elements()
    r = np.zeros(a.size, dtype=np.int64)
    step = max(1, (1 << 22) // xs.size)
    for start in range(0, xs.size, step):
        sums = (xs[start : start + step, None] ^ xs[None, :]).ravel()
        r += np.bincount(sums, minlength=a.size)
    return exact_dot(r, r)


@dataclass(frozen=True)
class CauchySchwarzBound:
    omega: float
    lower_bound: float
    quadruple_count: int
    sumset_size: int


def cauchy_schwarz_bound(a: DenseSet, b: DenseSet) -> CauchySchwarzBound:
    """Check omega(A,B,A,B) >= sqrt(|A||B|) / |A+B|, i.e. count * |A+B| >= (|A||B|)^2."""
    require_nonempty(a, b)
    e = energy(a, b, a, b)
    s = sumset(a, b).cardinality
    ab = a.cardinality * b.cardinality
    if e.quadruple_count * s < ab * ab:
        raise CertificateViolation("energy fell below the Cauchy-Schwarz lower bound")
    return CauchySchwarzBound(e.omega, ab**0.5 / s, e.quadruple_count, s)
