"""Subspace extraction for coherently flat, high-energy quadruples.

Given a coherently 1/sqrt(2K)-flat quadruple with omega >= 1/K, the common
large spectrum Lambda is a subspace, and H = Lambda^perp together with the
best translates x_i satisfies

    |H| >= (4/5) prod |A_i|^(1/4)   and   prod |A_i cap (x_i + H)|^(1/4) >= |H| / 2K.

Both are verified in integer fourth-power form before a certificate is issued.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Sequence

import numpy as np

from .errors import CertificateViolation, PreconditionLowEnergy, PreconditionNotFlat, SubspaceClosureViolation
from .exact import KParam
from .flatness import coherent_flatness, delta_threshold
from .fourier import FourierTable, walsh_transform
from .gf2 import DenseSet, Subspace, is_closed_under_addition, orthogonal_complement, require_nonempty
from .stats import energy_from_tables


def coset_counts(a: DenseSet, h: Subspace) -> tuple[np.ndarray, np.ndarray]:
    """Coset representatives met by A (ascending) and |A cap (x + H)| for each."""
    reps, counts = np.unique(h.reduce_array(a.elements()), return_counts=True)
    return reps, counts


def intersection_size(a: DenseSet, h: Subspace, x: int) -> int:
    return int(np.count_nonzero(h.reduce_array(a.elements()) == h.reduce(int(x))))


def translate_argmax(a: DenseSet, h: Subspace) -> tuple[int, int]:
    """Coset representative maximising |A cap (x + H)|; ties go to the smallest."""
    require_nonempty(a)
    reps, counts = coset_counts(a, h)
    best = int(np.argmax(counts))  # first maximum, and reps are ascending
    return int(reps[best]), int(counts[best])


def hlower_holds(h_size: int, sizes: Sequence[int]) -> bool:
    """|H| >= (4/5) prod |A_i|^(1/4), as 5^4 |H|^4 >= 4^4 prod |A_i|."""
    return 625 * h_size**4 >= 256 * prod(sizes)


def alower_holds(h_size: int, intersections: Sequence[int], k: KParam) -> bool:
    """prod I_i^(1/4) >= |H| / 2K, as 16 K^4 prod I_i >= |H|^4."""
    return 16 * k.fourth * prod(intersections) >= h_size**4


def lambda_bound_holds(lambda_size: int, dim: int, sizes: Sequence[int]) -> bool:
    """|Lambda| <= 5 * 2^n / (4 |A_i|) for each i, hence for the geometric mean."""
    per_set = all(4 * lambda_size * s <= 5 << dim for s in sizes)
    mean = 256 * lambda_size**4 * prod(sizes) <= 625 << (4 * dim)
    return per_set and mean


@dataclass(frozen=True)
class ExtractionCertificate:
    h: Subspace
    translates: tuple[int, ...]
    intersections: tuple[int, ...]
    sizes: tuple[int, ...]
    k: KParam
    lambda_size: int
    checks: dict

    @property
    def h_size(self) -> int:
        return self.h.cardinality

    def to_json(self) -> dict:
        return {
            "H_basis": self.h.to_json(),
            "H_rank": self.h.rank,
            "translates": list(self.translates),
            "intersections": list(self.intersections),
            "sizes": list(self.sizes),
            "lambda_size": self.lambda_size,
            "checks": dict(self.checks),
            **self.k.to_json(),
        }


def extract_flat(
    sets: Sequence[DenseSet],
    k: KParam,
    tables: Sequence[FourierTable] | None = None,
) -> ExtractionCertificate:
    """Build H = Lambda^perp and translates for a flat, high-energy quadruple."""
    if len(sets) != 4:
        raise ValueError("extraction needs four sets")
    require_nonempty(*sets)
    tabs = list(tables) if tables is not None else [walsh_transform(s) for s in sets]
    dim = sets[0].dim

    report = coherent_flatness(sets, delta_threshold(k), tabs)
    if not report.is_flat:
        raise PreconditionNotFlat(f"quadruple is not flat at {report.delta}", report.witness)
    e = energy_from_tables(tuple(tabs))
    if not e.at_least_inverse(k):
        raise PreconditionLowEnergy(f"omega = {e.omega:.6g} is below 1/K = {1 / float(k):.6g}")

    lam = np.flatnonzero(report.lambda_mask)
    if not is_closed_under_addition(lam.tolist(), dim):
        raise SubspaceClosureViolation("common 9/10-spectrum of a flat quadruple is not a subspace")
    h = orthogonal_complement(Subspace(dim, tuple(int(v) for v in lam)))

    picks = [translate_argmax(s, h) for s in sets]
    translates = tuple(x for x, _ in picks)
    intersections = tuple(c for _, c in picks)
    sizes = tuple(s.cardinality for s in sets)
    checks = {
        "hlower": hlower_holds(h.cardinality, sizes),
        "alower": alower_holds(h.cardinality, intersections, k),
        "lambda_bound": lambda_bound_holds(int(lam.size), dim, sizes),
        "cosets_partition": h.cardinality * int(lam.size) == 1 << dim,
    }
    failed = [name for name, ok in checks.items() if not ok]
    if failed:
        raise CertificateViolation(f"extraction certificate failed: {failed}")
    return ExtractionCertificate(h, translates, intersections, sizes, k, int(lam.size), checks)

