"""Vectors, dense subsets and subspaces of F_2^n.

Vectors are integer bit patterns; bit ``i`` is coordinate ``i``.  A dense set
is a boolean occupancy array of length ``2**n`` indexed by those integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, DimensionTooLarge, EmptySet, ZeroFrequency

MAX_DIM = 24


def _check_dim(dim: int) -> None:
    if not isinstance(dim, (int, np.integer)) or dim < 1:
        raise ValueError(f"dimension must be a positive integer, got {dim!r}")
    if dim > MAX_DIM:
        raise DimensionTooLarge(f"dimension {dim} exceeds the cap of {MAX_DIM}")


def parity(x: int) -> int:
    return int(x).bit_count() & 1


@dataclass(frozen=True, order=True)
class GF2Vector:
    bits: int
    dim: int

    def __post_init__(self) -> None:
        _check_dim(self.dim)
        if not 0 <= self.bits < (1 << self.dim):
            raise ValueError(f"{self.bits} is not a vector of F_2^{self.dim}")

    def __int__(self) -> int:
        return self.bits

    def __index__(self) -> int:
        return self.bits

    def __add__(self, other: "GF2Vector") -> "GF2Vector":
        if self.dim != other.dim:
            raise DimensionMismatch(f"{self.dim} != {other.dim}")
        return GF2Vector(self.bits ^ other.bits, self.dim)

    def __str__(self) -> str:
        return format(self.bits, f"0{self.dim}b")


def dot(u: GF2Vector, v: GF2Vector) -> int:
    if u.dim != v.dim:
        raise DimensionMismatch(f"dot of vectors in F_2^{u.dim} and F_2^{v.dim}")
    return parity(u.bits & v.bits)


def parities(xs: np.ndarray, xi: int) -> np.ndarray:
    """Vectorised ``xi . x`` for an integer array of points."""
    return (np.bitwise_count(np.asarray(xs, dtype=np.int64) & xi) & 1).astype(np.int8)


class DenseSet:
    """A subset of F_2^n stored as a 2^n occupancy vector.  Immutable."""

    __slots__ = ("dim", "_occ", "cardinality")

    def __init__(self, dim: int, occupancy: np.ndarray):
        _check_dim(dim)
        occ = np.asarray(occupancy, dtype=bool)
        if occ.shape != (1 << dim,):
            raise ValueError(f"occupancy must have length 2^{dim}")
        occ = occ.copy()
        occ.setflags(write=False)
        self.dim = dim
        self._occ = occ
        self.cardinality = int(np.count_nonzero(occ))

    @classmethod
    def from_elements(cls, dim: int, elements: Iterable[int]) -> "DenseSet":
        _check_dim(dim)
        occ = np.zeros(1 << dim, dtype=bool)
        idx = np.fromiter((int(e) for e in elements), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= (1 << dim)):
            raise ValueError(f"elements must lie in [0, 2^{dim})")
        occ[idx] = True
        return cls(dim, occ)

    @classmethod
    def full(cls, dim: int) -> "DenseSet":
        return cls(dim, np.ones(1 << dim, dtype=bool))

    @classmethod
    def empty(cls, dim: int) -> "DenseSet":
        return cls(dim, np.zeros(1 << dim, dtype=bool))

    @property
    def occupancy(self) -> np.ndarray:
        return self._occ

    @property
    def size(self) -> int:
        return 1 << self.dim

    def elements(self) -> np.ndarray:
        return np.flatnonzero(self._occ)

    def __len__(self) -> int:
        return self.cardinality

    def __contains__(self, x: int) -> bool:
        return bool(self._occ[int(x)])

    def __iter__(self):
        return iter(int(e) for e in self.elements())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DenseSet):
            return NotImplemented
        return self.dim == other.dim and bool(np.array_equal(self._occ, other._occ))

    def __hash__(self) -> int:
        return hash((self.dim, self._occ.tobytes()))

    def __repr__(self) -> str:
        return f"DenseSet(dim={self.dim}, cardinality={self.cardinality})"

    def issubset(self, other: "DenseSet") -> bool:
        _same_dim(self, other)
        return not np.any(self._occ & ~other._occ)

    def translate(self, t: int) -> "DenseSet":
        """Return t + A."""
        idx = np.arange(self.size, dtype=np.int64) ^ int(t)
        return DenseSet(self.dim, self._occ[idx])

    def intersection(self, other: "DenseSet") -> "DenseSet":
        _same_dim(self, other)
        return DenseSet(self.dim, self._occ & other._occ)

    def union(self, other: "DenseSet") -> "DenseSet":
        _same_dim(self, other)
        return DenseSet(self.dim, self._occ | other._occ)

    def to_json(self) -> dict:
        return {"dim": self.dim, "elements": [int(e) for e in self.elements()]}

    @classmethod
    def from_json(cls, obj: dict) -> "DenseSet":
        try:
            return cls.from_elements(int(obj["dim"]), obj["elements"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed set literal: {exc}") from exc


def _same_dim(*sets: DenseSet) -> None:
    dims = {s.dim for s in sets}
    if len(dims) != 1:
        raise DimensionMismatch(f"sets live in different ambient dimensions {sorted(dims)}")


def require_nonempty(*sets: DenseSet) -> None:
    _same_dim(*sets)
    for s in sets:
        if s.cardinality == 0:
            raise EmptySet("operation requires non-empty sets")


def _rref(rows: Iterable[int]) -> tuple[int, ...]:
    """Reduced row echelon form; pivot of a row is its highest set bit."""
    basis: list[int] = []
    for v in rows:
        for b in basis:
            if v & (1 << (b.bit_length() - 1)):
                v ^= b
        if not v:
            continue
        p = 1 << (v.bit_length() - 1)
        basis = [b ^ v if b & p else b for b in basis]
        basis.append(v)
    return tuple(sorted(basis, reverse=True))


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of F_2^n with its basis in reduced row echelon form.

    Equality of two Subspace values is equality of the spans.
    """

    dim: int
    basis: tuple[int, ...]

    def __post_init__(self) -> None:
        _check_dim(self.dim)
        canonical = _rref(self.basis)
        if any(b >> self.dim for b in canonical):
            raise ValueError(f"basis vector outside F_2^{self.dim}")
        object.__setattr__(self, "basis", canonical)

    @classmethod
    def zero(cls, dim: int) -> "Subspace":
        return cls(dim, ())

    @classmethod
    def full(cls, dim: int) -> "Subspace":
        return cls(dim, tuple(1 << i for i in range(dim)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def codim(self) -> int:
        return self.dim - self.rank

    @property
    def cardinality(self) -> int:
        return 1 << self.rank

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(b.bit_length() - 1 for b in self.basis)

    def reduce(self, x: int) -> int:
        """Smallest element of the coset x + self."""
        for b in self.basis:
            if x & (1 << (b.bit_length() - 1)):
                x ^= b
        return x

    def reduce_array(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64).copy()
        for b in self.basis:
            hit = (xs >> (b.bit_length() - 1)) & 1
            xs ^= hit * b
        return xs

    def __contains__(self, x: object) -> bool:
        return self.reduce(int(x)) == 0

    def elements(self) -> np.ndarray:
        out = np.zeros(1, dtype=np.int64)
        for b in reversed(self.basis):
            out = np.concatenate([out, out ^ b])
        return np.sort(out)

    def as_set(self) -> DenseSet:
        return DenseSet.from_elements(self.dim, self.elements())

    def coset(self, x: int) -> DenseSet:
        return DenseSet.from_elements(self.dim, self.elements() ^ int(x))

    def to_json(self) -> list[int]:
        return list(self.basis)


def span_closure(vectors: Sequence[GF2Vector | int], dim: int | None = None) -> Subspace:
    """Smallest subspace containing the given vectors."""
    dims = {v.dim for v in vectors if isinstance(v, GF2Vector)}
    if len(dims) > 1 or (dim is not None and dims and dims != {dim}):
        raise DimensionMismatch(f"vectors of mixed dimension {sorted(dims | {dim} - {None})}")
    if dim is None:
        if not dims:
            raise ValueError("dimension required for an empty or untyped vector list")
        dim = dims.pop()
    return Subspace(dim, tuple(int(v) for v in vectors))


def orthogonal_complement(space: Subspace) -> Subspace:
    pivots = set(space.pivots)
    rows = []
    for f in range(space.dim):
        if f in pivots:
            continue
        v = 1 << f
        for b in space.basis:
            if b >> f & 1:
                v |= 1 << (b.bit_length() - 1)
        rows.append(v)
    return Subspace(space.dim, tuple(rows))


def is_closed_under_addition(points: Iterable[int], dim: int) -> bool:
    """True iff a non-empty set of vectors is closed under addition."""
    pts = {int(p) for p in points}
    if not pts:
        raise EmptySet("closure test needs a non-empty set")
    # A non-empty closed set contains 0 and equals its own span.
    return Subspace(dim, tuple(pts)).cardinality == len(pts) and 0 in pts


def coset_representatives(space: Subspace) -> np.ndarray:
    """Lexicographically smallest element of every coset, ascending, 0 first."""
    free = [i for i in range(space.dim) if i not in set(space.pivots)]
    reps = np.zeros(1, dtype=np.int64)
    for i in free:
        reps = np.concatenate([reps, reps | (1 << i)])
    return np.sort(reps)


def slice_set(a: DenseSet, xi: int | GF2Vector, j: int) -> DenseSet:
    """{x in A : xi . x = j}."""
    if isinstance(xi, GF2Vector):
        if xi.dim != a.dim:
            raise DimensionMismatch("frequency and set dimensions differ")
        xi = xi.bits
    if xi == 0:
        raise ZeroFrequency("slicing along the zero frequency")
    if j not in (0, 1):
        raise ValueError("slice label must be 0 or 1")
    mask = parities(np.arange(a.size, dtype=np.int64), int(xi)) == j
    return DenseSet(a.dim, a.occupancy & mask)
