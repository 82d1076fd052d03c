"""Seeded set generators for experiments and tests.

All randomness comes from ``numpy.random.Generator(PCG64(seed))``; the same
spec always yields the same set.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import BadSpec
from .gf2 import MAX_DIM, DenseSet, Subspace

PRNG_ALGORITHM = "numpy.random.PCG64"

FAMILIES = ("subspace", "affine", "coset_union", "subspace_plus_noise", "independent_vectors", "random")


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    dim: int
    seed: int = 0
    rank: int | None = None  # subspace, affine, coset_union, subspace_plus_noise
    cosets: int | None = None  # coset_union
    noise: int | None = None  # subspace_plus_noise
    m: int | None = None  # independent_vectors
    density: float | None = None  # random

    def to_json(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def resolved(self) -> "GeneratorSpec":
        """Fill family parameters left unset with their defaults for this dimension."""
        n = self.dim
        defaults = {
            "subspace": {"rank": n // 2},
            "affine": {"rank": n // 2},
            "coset_union": {"rank": max(1, n // 2 - 1), "cosets": 3},
            "subspace_plus_noise": {"rank": n // 2, "noise": 4},
            "independent_vectors": {"m": n},
            "random": {"density": 0.25},
        }
        if self.family not in defaults:
            raise BadSpec(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        fill = {k: v for k, v in defaults[self.family].items() if getattr(self, k) is None}
        if not fill:
            return self
        return GeneratorSpec(**{**asdict(self), **fill})


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & (2**64 - 1)))


def random_subspace(dim: int, rank: int, rng: np.random.Generator) -> Subspace:
    if not 0 <= rank <= dim:
        raise BadSpec(f"rank {rank} outside [0, {dim}]")
    space = Subspace.zero(dim)
    while space.rank < rank:
        v = int(rng.integers(1, 1 << dim))
        if v not in space:
            space = Subspace(dim, space.basis + (v,))
    return space


def _outside(space: Subspace, taken: set[int], rng: np.random.Generator) -> int:
    while True:
        rep = space.reduce(int(rng.integers(0, 1 << space.dim)))
        if rep not in taken:
            return rep


def generate(spec: GeneratorSpec) -> DenseSet:
    spec = spec.resolved()
    n = spec.dim
    if not 1 <= n <= MAX_DIM:
        raise BadSpec(f"dimension {n} outside [1, {MAX_DIM}]")
    rng = _rng(spec.seed)
    family = spec.family

    if family in ("subspace", "affine"):
        space = random_subspace(n, spec.rank, rng)
        shift = int(rng.integers(0, 1 << n)) if family == "affine" else 0
        return space.coset(shift)

    if family == "coset_union":
        space = random_subspace(n, spec.rank, rng)
        if not 1 <= spec.cosets <= 1 << space.codim:
            raise BadSpec(f"cannot pick {spec.cosets} distinct cosets of a rank-{spec.rank} subspace")
        reps: set[int] = set()
        while len(reps) < spec.cosets:
            reps.add(_outside(space, reps, rng))
        elements = np.concatenate([space.elements() ^ r for r in sorted(reps)])
        return DenseSet.from_elements(n, elements)

    if family == "subspace_plus_noise":
        space = random_subspace(n, spec.rank, rng)
        outside = (1 << n) - space.cardinality
        if not 0 <= spec.noise <= outside:
            raise BadSpec(f"noise count {spec.noise} outside [0, {outside}]")
        occ = space.as_set().occupancy.copy()
        candidates = np.flatnonzero(~occ)
        occ[rng.choice(candidates, size=spec.noise, replace=False)] = True
        return DenseSet(n, occ)

    if family == "independent_vectors":
        if not 1 <= spec.m <= n:
            raise BadSpec(f"m = {spec.m} outside [1, {n}]")
        return DenseSet.from_elements(n, [1 << i for i in range(spec.m)])

    if family == "random":
        p = float(spec.density)
        if not 0.0 < p <= 1.0:
            raise BadSpec(f"density {p} outside (0, 1]")
        occ = rng.random(1 << n) < p
        if not occ.any():
            occ[int(rng.integers(0, 1 << n))] = True
        return DenseSet(n, occ)

    raise BadSpec(f"unknown family {family!r}")
