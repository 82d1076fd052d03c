"""Coherent flatness of a quadruple of sets and the witness frequency finder."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError
from .exact import KParam
from .fourier import EIGHT_TENTHS, NINE_TENTHS, FourierTable, SpectrumThreshold, spectrum_mask, walsh_transform
from .gf2 import DenseSet, require_nonempty


def delta_threshold(k: KParam) -> SpectrumThreshold:
    """The threshold 1/sqrt(2K), in the smallest exact power available."""
    k1 = k.rational()
    if k1 is not None:
        return SpectrumThreshold(1 / (2 * k1), 2)
    k2 = k.square()
    if k2 is not None:
        return SpectrumThreshold(1 / (4 * k2), 4)
    return SpectrumThreshold(1 / (16 * k.fourth), 8)


@dataclass(frozen=True)
class FlatnessReport:
    is_flat: bool
    delta: SpectrumThreshold
    witness: int | None = None
    # per-set walsh values at the witness and its two spectrum memberships
    witness_walsh: tuple[int, ...] = ()
    in_high: tuple[bool, ...] = ()
    in_low: tuple[bool, ...] = ()
    lambda_mask: np.ndarray | None = field(default=None, repr=False, compare=False)

    def to_json(self) -> dict:
        out: dict = {"is_flat": self.is_flat, "delta": str(self.delta)}
        if self.witness is not None:
            out["witness"] = self.witness
            out["witness_walsh"] = list(self.witness_walsh)
            out["in_spec_9_10"] = list(self.in_high)
            out["in_spec_delta"] = list(self.in_low)
        return out


def _tables(sets: Sequence[DenseSet], tables: Sequence[FourierTable] | None) -> list[FourierTable]:
    if len(sets) != 4:
        raise ValueError("coherent flatness is defined for quadruples")
    require_nonempty(*sets)
    if tables is None:
        return [walsh_transform(s) for s in sets]
    return list(tables)


def coherent_flatness(
    sets: Sequence[DenseSet],
    delta: SpectrumThreshold | KParam,
    tables: Sequence[FourierTable] | None = None,
) -> FlatnessReport:
    """Test whether every frequency lies in all four Spec_{9/10} or in none of
    the four Spec_delta; otherwise report the smallest violating frequency."""
    if isinstance(delta, KParam):
        delta = delta_threshold(delta)
    if not delta <= EIGHT_TENTHS:
        raise DomainError(f"flatness threshold {delta} exceeds 8/10")
    tabs = _tables(sets, tables)
    high = np.stack([spectrum_mask(t, NINE_TENTHS) for t in tabs])
    low = np.stack([spectrum_mask(t, delta) for t in tabs])
    all_high = high.all(axis=0)
    ok = all_high | ~low.any(axis=0)
    bad = np.flatnonzero(~ok)
    if bad.size == 0:
        return FlatnessReport(True, delta, lambda_mask=all_high)
    xi = int(bad[0])
    return FlatnessReport(
        False,
        delta,
        witness=xi,
        witness_walsh=tuple(t[xi] for t in tabs),
        in_high=tuple(bool(h[xi]) for h in high),
        in_low=tuple(bool(lo[xi]) for lo in low),
        lambda_mask=all_high,
    )


def flatness_invariance_check(
    sets: Sequence[DenseSet],
    translates: Sequence[int],
    delta: SpectrumThreshold | KParam,
) -> bool:
    """Whether translating each A_i by x_i leaves the flatness verdict unchanged."""
    before = coherent_flatness(sets, delta)
    after = coherent_flatness([s.translate(t) for s, t in zip(sets, translates)], delta)
    return before.is_flat == after.is_flat

