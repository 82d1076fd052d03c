"""Refinement engines and the end-to-end structure-extraction drivers.

Both engines repeatedly test the current sets for coherent flatness.  A
non-flat quadruple yields a witness frequency xi, and slicing every set along
the hyperplanes xi . x = 0 / 1 produces subsets with strictly smaller doubling
(two-set engine) or strictly larger normalised energy (four-set engine).  A
flat quadruple goes to :func:`extract_flat`.

By default the parameter K tracks the current sets (K_t = current doubling,
resp. current 1/omega).  With ``fixed_k`` the original K is used for the
flatness threshold throughout, and each step must shrink the doubling by the
factor (1 - 1/(100 sqrt K)) (resp. 1/omega by (1 - 1e-4/K)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .analytic import EVEN_LABELS
from .errors import (
    CertificateViolation,
    DecrementUnavailable,
    EmptySlices,
    IncrementUnavailable,
    IterationBudgetExceeded,
    PreconditionLowEnergy,
)
from .exact import KParam, ceil_root, format_rational, radical_sign
from .extraction import ExtractionCertificate, extract_flat, intersection_size
from .flatness import FlatnessReport, coherent_flatness, delta_threshold
from .fourier import NINE_TENTHS, SpectrumThreshold, walsh_transform
from .gf2 import DenseSet, Subspace, require_nonempty, slice_set
from .stats import DoublingValue, EnergyValue, cauchy_schwarz_bound, doubling, energy_from_tables

DOUBLING_RATE = Fraction(1, 100)
ENERGY_RATE = Fraction(1, 10**4)


@dataclass(frozen=True)
class StepRecord:
    witness: int
    slices: tuple[int, ...]
    sizes_before: tuple[int, ...]
    sizes_after: tuple[int, ...]
    # Dbl^2 on the doubling path, 1/omega^4 on the energy path
    measure_before: Fraction
    measure_after: Fraction

    def to_json(self, measure: str) -> dict:
        root = 2 if measure == "dbl" else 4
        return {
            "witness": self.witness,
            "slices": list(self.slices),
            "sizes_before": list(self.sizes_before),
            "sizes_after": list(self.sizes_after),
            f"{measure}_before": float(self.measure_before) ** (1 / root),
            f"{measure}_after": float(self.measure_after) ** (1 / root),
            f"{measure}_power{root}_before": format_rational(self.measure_before),
            f"{measure}_power{root}_after": format_rational(self.measure_after),
        }


@dataclass
class RefinementTrace:
    measure: str  # "dbl" or "inv_omega"
    budget: int
    steps: list[StepRecord] = field(default_factory=list)
    terminal_flat: bool = False
    final_flatness: FlatnessReport | None = None

    @property
    def iterations(self) -> int:
        return len(self.steps)

    def to_json(self) -> dict:
        return {
            "measure": self.measure,
            "iterations": self.iterations,
            "budget": self.budget,
            "terminal_flat": self.terminal_flat,
            "steps": [s.to_json(self.measure) for s in self.steps],
        }


@dataclass(frozen=True)
class TheoremResult:
    kind: str
    h: Subspace
    translates: tuple[int, ...]
    intersections: tuple[int, ...]
    sizes: tuple[int, ...]
    k: KParam  # the parameter the final certificate is stated with
    k_final: KParam  # the parameter extraction was run with
    trace: RefinementTrace
    extraction: ExtractionCertificate
    checks: dict
    fixed_k: bool = False

    @property
    def h_size(self) -> int:
        return self.h.cardinality

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "fixed_k": self.fixed_k,
            "H_basis": self.h.to_json(),
            "H_size": self.h_size,
            "translates": list(self.translates),
            "intersections": list(self.intersections),
            "sizes": list(self.sizes),
            "K": self.k.to_json(),
            "K_final": self.k_final.to_json(),
            "checks": dict(self.checks),
            "h_over_sizes": [self.h_size / s for s in self.sizes],
            "extraction": self.extraction.to_json(),
            "trace": self.trace.to_json(),
        }


# -- exact step targets ------------------------------------------------------


def decrement_target_holds(before_sq: Fraction, after_sq: Fraction, k: KParam) -> bool:
    """Dbl_after <= Dbl_before * (1 - 1/(100 sqrt K)).

    With K = Dbl_before this is Dbl_after <= K - sqrt(K)/100.
    """
    before_sq, after_sq = Fraction(before_sq), Fraction(after_sq)
    sign = radical_sign(
        [
            (1, before_sq, 2),
            (-DOUBLING_RATE, before_sq**4 / k.fourth, 8),
            (-1, after_sq, 2),
        ]
    )
    return sign >= 0


def increment_target_holds(before: EnergyValue, after: EnergyValue, k: KParam) -> bool:
    """1/omega_after <= (1/omega_before) * (1 - 1e-4/K).

    With K = 1/omega_before this is omega_after >= 1/(K - 1e-4).
    """
    if after.quadruple_count == 0:
        return False
    x = before.inverse().fourth
    y = after.inverse().fourth
    sign = radical_sign([(1, x, 4), (-ENERGY_RATE, x / k.fourth, 4), (-1, y, 4)])
    return sign >= 0


def doubling_budget(k0: KParam, fixed_k: bool = False) -> int:
    """ceil(200 sqrt K0) + 1; the fixed-K schedule adds ceil(100 sqrt K0 ln K0)."""
    budget = ceil_root(200**8 * k0.fourth, 8) + 1
    if fixed_k:
        root_k = float(k0) ** 0.5
        budget += math.ceil(100 * root_k * math.log(float(k0))) + 1
    return budget


def energy_budget(k: KParam, fixed_k: bool = False) -> int:
    """ceil(1e4 (K - 1)) + 1; the fixed-K schedule adds ceil(1e4 K ln K)."""
    budget = ceil_root(10**16 * k.fourth, 4) - 10**4 + 1
    if fixed_k:
        kf = float(k)
        budget += math.ceil(1e4 * kf * math.log(kf)) + 1
    return budget


def _is_witness(walsh_at_xi: Sequence[int], sizes: Sequence[int], delta: SpectrumThreshold) -> bool:
    not_high = any(not NINE_TENTHS.admits(w, s) for w, s in zip(walsh_at_xi, sizes))
    low = any(delta.admits(w, s) for w, s in zip(walsh_at_xi, sizes))
    return not_high and low


def _slices(s: DenseSet, xi: int) -> tuple[DenseSet, DenseSet]:
    return slice_set(s, xi, 0), slice_set(s, xi, 1)


# -- single steps --------------------------------------------------------------


def doubling_decrement_step(
    a: DenseSet, b: DenseSet, xi: int, k: KParam | None = None
) -> tuple[DenseSet, DenseSet, StepRecord]:
    """Slice A and B along xi and keep the pair of slices with least doubling.

    ``k`` defaults to Dbl(A, B).  Raises DecrementUnavailable when xi is not a
    non-flatness witness at 1/sqrt(2K) or when no slice pair reaches the
    target of :func:`decrement_target_holds`.
    """
    require_nonempty(a, b)
    xi = int(xi)
    before = doubling(a, b)
    if k is None:
        k = before.as_k()
    pieces = (_slices(a, xi), _slices(b, xi))
    walsh_at = [p[0].cardinality - p[1].cardinality for p in pieces]
    if not _is_witness(walsh_at * 2, [a.cardinality, b.cardinality] * 2, delta_threshold(k)):
        raise DecrementUnavailable(f"frequency {xi} is not a non-flatness witness")

    best: tuple[DoublingValue, int, int] | None = None
    for i in (0, 1):
        for j in (0, 1):
            ai, bj = pieces[0][i], pieces[1][j]
            if ai.cardinality == 0 or bj.cardinality == 0:
                continue
            d = doubling(ai, bj)
            if best is None or d.squared < best[0].squared:
                best = (d, i, j)
    if best is None:
        raise EmptySlices("every slice pair has an empty member")
    d, i, j = best
    if not decrement_target_holds(before.squared, d.squared, k):
        raise DecrementUnavailable(
            f"best slice pair has Dbl = {float(d):.6g}, target not met from {float(before):.6g}"
        )
    record = StepRecord(
        xi,
        (i, j),
        (a.cardinality, b.cardinality),
        (d.size_a, d.size_b),
        before.squared,
        d.squared,
    )
    return pieces[0][i], pieces[1][j], record


def energy_increment_step(
    sets: Sequence[DenseSet], xi: int, k: KParam | None = None
) -> tuple[tuple[DenseSet, ...], StepRecord]:
    """Slice the four sets along xi and keep the even labelling of largest omega.

    ``k`` defaults to 1/omega(A_1, ..., A_4).  Raises IncrementUnavailable when
    xi is not a non-flatness witness at 1/sqrt(2K) or the target of
    :func:`increment_target_holds` is missed.
    """
    if len(sets) != 4:
        raise ValueError("energy increment acts on quadruples")
    require_nonempty(*sets)
    xi = int(xi)
    tables = [walsh_transform(s) for s in sets]
    before = energy_from_tables(tuple(tables))
    if before.quadruple_count == 0:
        raise PreconditionLowEnergy("quadruple has no additive quadruples")
    if k is None:
        k = before.inverse()
    pieces = [_slices(s, xi) for s in sets]
    walsh_at = [t[xi] for t in tables]
    if not _is_witness(walsh_at, [s.cardinality for s in sets], delta_threshold(k)):
        raise IncrementUnavailable(f"frequency {xi} is not a non-flatness witness")

    slice_tables = [[walsh_transform(p) if p.cardinality else None for p in pair] for pair in pieces]
    best: tuple[EnergyValue, tuple[int, ...]] | None = None
    for js in EVEN_LABELS:
        tabs = [slice_tables[i][j] for i, j in enumerate(js)]
        if any(t is None for t in tabs):
            continue
        e = energy_from_tables(tuple(tabs))
        if e.quadruple_count == 0:
            continue
        if best is None or e.compare(best[0]) > 0:
            best = (e, js)
    if best is None:
        raise EmptySlices("no even labelling has non-empty slices with positive energy")
    e, js = best
    if not increment_target_holds(before, e, k):
        raise IncrementUnavailable(f"best labelling has omega = {e.omega:.6g}, target not met")
    chosen = tuple(pieces[i][j] for i, j in enumerate(js))
    record = StepRecord(
        xi,
        js,
        tuple(s.cardinality for s in sets),
        tuple(c.cardinality for c in chosen),
        before.inverse().fourth,
        e.inverse().fourth,
    )
    return chosen, record


# -- drivers -------------------------------------------------------------------


def _best_of(original: DenseSet, h: Subspace, candidates: Sequence[int]) -> tuple[int, int]:
    scored = [(intersection_size(original, h, x), -x) for x in candidates]
    count, neg_x = max(scored)
    return -neg_x, count


def freiman_pipeline(a: DenseSet, b: DenseSet, fixed_k: bool = False) -> TheoremResult:
    """Find H, x, y with |A cap (x+H)| |B cap (y+H)| (2 K0)^2 >= |H|^2, K0 = Dbl(A, B)."""
    require_nonempty(a, b)
    k0 = doubling(a, b).as_k()
    trace = RefinementTrace("dbl", doubling_budget(k0, fixed_k))
    at, bt = a, b
    while True:
        k_t = k0 if fixed_k else doubling(at, bt).as_k()
        ta, tb = walsh_transform(at), walsh_transform(bt)
        quad = (at, bt, at, bt)
        report = coherent_flatness(quad, k_t, (ta, tb, ta, tb))
        if report.is_flat:
            break
        if trace.iterations >= trace.budget:
            raise IterationBudgetExceeded(f"doubling decrement ran past {trace.budget} steps")
        at, bt, record = doubling_decrement_step(at, bt, report.witness, k_t)
        trace.steps.append(record)
    trace.terminal_flat = True
    trace.final_flatness = report

    cauchy_schwarz_bound(at, bt)  # omega(A',B',A',B') >= 1/Dbl(A',B') >= 1/K_t
    cert = extract_flat(quad, k_t, (ta, tb, ta, tb))
    x, ia = _best_of(a, cert.h, (cert.translates[0], cert.translates[2]))
    y, ib = _best_of(b, cert.h, (cert.translates[1], cert.translates[3]))
    h4 = cert.h_size**4
    checks = {
        "theorem": (ia * ib) ** 2 * 16 * k0.fourth >= h4,
        "at_final_k": (ia * ib) ** 2 * 16 * k_t.fourth >= h4,
        "subsets": at.issubset(a) and bt.issubset(b),
    }
    if not all(checks.values()):
        raise CertificateViolation(f"final certificate failed: {checks}")
    return TheoremResult(
        "freiman", cert.h, (x, y), (ia, ib), (a.cardinality, b.cardinality),
        k0, k_t, trace, cert, checks, fixed_k,
    )


def single_set_freiman(a: DenseSet, fixed_k: bool = False) -> TheoremResult:
    """One translate x with |A cap (x+H)| 2 K0 >= |H|, K0 = Dbl(A, A)."""
    res = freiman_pipeline(a, a, fixed_k)
    x, ia = _best_of(a, res.h, res.translates)
    checks = {
        "theorem": ia**4 * 16 * res.k.fourth >= res.h_size**4,
        "pair_theorem": res.checks["theorem"],
        "subsets": res.checks["subsets"],
    }
    if not all(checks.values()):
        raise CertificateViolation(f"single-set certificate failed: {checks}")
    return TheoremResult(
        "single_freiman", res.h, (x,), (ia,), (a.cardinality,),
        res.k, res.k_final, res.trace, res.extraction, checks, fixed_k,
    )


def _as_k(k: KParam | Fraction | int | str) -> KParam:
    if isinstance(k, KParam):
        return k
    return KParam.from_rational(Fraction(k))


def bsg_pipeline(
    sets: Sequence[DenseSet], k: KParam | Fraction | int | str, fixed_k: bool = False
) -> TheoremResult:
    """Find H, x_1..x_4 with prod |A_i cap (x_i+H)| (2K)^4 >= |H|^4 given omega >= 1/K."""
    if len(sets) != 4:
        raise ValueError("the energy pipeline acts on quadruples")
    require_nonempty(*sets)
    k = _as_k(k)
    start = energy_from_tables(tuple(walsh_transform(s) for s in sets))
    if not start.at_least_inverse(k):
        raise PreconditionLowEnergy(f"omega = {start.omega:.6g} is below 1/K = {1 / float(k):.6g}")
    trace = RefinementTrace("inv_omega", energy_budget(k, fixed_k))
    current = tuple(sets)
    while True:
        tables = tuple(walsh_transform(s) for s in current)
        e = energy_from_tables(tables)
        k_t = k if fixed_k else min(k, e.inverse())
        report = coherent_flatness(current, k_t, tables)
        if report.is_flat:
            break
        if trace.iterations >= trace.budget:
            raise IterationBudgetExceeded(f"energy increment ran past {trace.budget} steps")
        current, record = energy_increment_step(current, report.witness, k_t)
        trace.steps.append(record)
    trace.terminal_flat = True
    trace.final_flatness = report

    cert = extract_flat(current, k_t, tables)
    intersections = tuple(intersection_size(s, cert.h, x) for s, x in zip(sets, cert.translates))
    product = 1
    for c in intersections:
        product *= c
    h4 = cert.h_size**4
    checks = {
        "theorem": 16 * k.fourth * product >= h4,
        "at_final_k": 16 * k_t.fourth * product >= h4,
        "subsets": all(c.issubset(s) for c, s in zip(current, sets)),
    }
    if not all(checks.values()):
        raise CertificateViolation(f"final certificate failed: {checks}")
    return TheoremResult(
        "bsg", cert.h, cert.translates, intersections, tuple(s.cardinality for s in sets),
        k, k_t, trace, cert, checks, fixed_k,
    )


def single_set_bsg(a: DenseSet, k: KParam | Fraction | int | str, fixed_k: bool = False) -> TheoremResult:
    """An affine H with |A cap H| >= |H| / 2K given at least |A|^3/K additive quadruples."""
    res = bsg_pipeline((a, a, a, a), k, fixed_k)
    x, ia = _best_of(a, res.h, res.translates)
    checks = {
        "theorem": ia**4 * 16 * res.k.fourth >= res.h_size**4,
        "quadruple_theorem": res.checks["theorem"],
        "subsets": res.checks["subsets"],
    }
    if not all(checks.values()):
        raise CertificateViolation(f"single-set certificate failed: {checks}")
    return TheoremResult(
        "single_bsg", res.h, (x,), (ia,), (a.cardinality,),
        res.k, res.k_final, res.trace, res.extraction, checks, fixed_k,
    )
