"""Oracle and property suites behind ``gf2struct verify``.

Each suite returns a :class:`SuiteResult`; ``budget`` scales the number of
randomised trials.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import analytic
from .errors import GF2StructError
from .exact import KParam
from .extraction import extract_flat
from .flatness import coherent_flatness, flatness_invariance_check
from .fourier import fwht, naive_walsh_batch
from .generators import FAMILIES, GeneratorSpec, generate, random_subspace
from .gf2 import DenseSet, is_closed_under_addition
from .pipelines import bsg_pipeline, freiman_pipeline
from .stats import brute_energy, cauchy_schwarz_bound, doubling, energy

SUITES = ("fourier", "energy", "analytic", "flatness", "extraction", "pipelines")


@dataclass
class SuiteResult:
    suite: str
    checks: int = 0
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, **context) -> None:
        self.checks += 1
        if not ok:
            self.failures.append(context)

    def to_json(self) -> dict:
        return {"suite": self.suite, "checks": self.checks, "passed": self.passed, "failures": self.failures}


def _random_set(rng: np.random.Generator, n: int, max_size: int | None = None) -> DenseSet:
    size = 1 << n
    k = int(rng.integers(1, min(max_size or size, size) + 1))
    return DenseSet.from_elements(n, rng.choice(size, size=k, replace=False))


def suite_fourier(budget: int = 200, seed: int = 0) -> SuiteResult:
    out = SuiteResult("fourier")
    occ = ((np.arange(1 << 16)[:, None] >> np.arange(16)) & 1).astype(bool)
    fast = fwht(occ.astype(np.int64))
    slow = naive_walsh_batch(occ)
    out.check(bool(np.array_equal(fast, slow)), case="all subsets of F_2^4")
    out.check(bool(np.all((fast**2).sum(axis=1) == 16 * occ.sum(axis=1))), case="Plancherel, F_2^4")
    rng = np.random.default_rng(seed)
    for n in (6, 8, 10):
        batch = rng.random((budget, 1 << n)) < rng.random((budget, 1))
        fast = fwht(batch.astype(np.int64))
        out.check(bool(np.array_equal(fast, naive_walsh_batch(batch))), case=f"random sets n={n}")
        out.check(
            bool(np.all((fast**2).sum(axis=1) == (1 << n) * batch.sum(axis=1))), case=f"Plancherel n={n}"
        )
    return out


def suite_energy(budget: int = 200, seed: int = 0) -> SuiteResult:
    out = SuiteResult("energy")
    rng = np.random.default_rng(seed)
    for t in range(budget):
        n = int(rng.integers(2, 9))
        sets = [_random_set(rng, n, 64) for _ in range(4)]
        e = energy(*sets)
        out.check(e.quadruple_count == brute_energy(*sets), case="fourier vs brute", trial=t)
        out.check(e.within_unit_interval(), case="omega <= 1", trial=t)
        a, b = sets[0], sets[1]
        try:
            cauchy_schwarz_bound(a, b)
            ok = True
        except GF2StructError:
            ok = False
        out.check(ok, case="Cauchy-Schwarz energy bound", trial=t)
        out.check(doubling(a, b).satisfies_bounds(), case="doubling size bounds", trial=t)
    return out


def suite_analytic(budget: int = 10_000, seed: int = 0) -> SuiteResult:
    out = SuiteResult("analytic")
    g = np.linspace(0.0, 1.0, 201)
    a, b = np.meshgrid(g, g)
    for eps in (1e-4, 1e-3, 1e-2):
        holds, half, ends, _ = analytic.classify_f(a, b, eps)
        bad = int(np.count_nonzero(holds & ~half & ~ends))
        out.check(bad == 0, case="F dichotomy grid", eps=eps, counterexamples=bad)
    coarse = np.stack(np.meshgrid(*[np.linspace(0, 1, 11)] * 4), axis=-1).reshape(-1, 4)
    fine = np.stack(np.meshgrid(*[np.linspace(0, 1, 21)] * 4), axis=-1).reshape(-1, 4)
    rand = np.random.default_rng(seed).random((budget, 4))
    out.check(float(analytic.g_values(fine).max()) <= 1 + 1e-12, case="G <= 1 on 21^4 grid")
    for eps in (1e-4, 1e-3):
        for name, pts in (("grid", coarse), ("random", rand)):
            holds, half, ends, gv = analytic.classify_g(pts, eps)
            bad = int(np.count_nonzero(holds & ~half & ~ends))
            out.check(bad == 0, case=f"G dichotomy {name}", eps=eps, counterexamples=bad)
            out.check(float(gv.max()) <= 1 + 1e-12, case=f"G <= 1 {name}")
    return out


def _coset_quadruple(rng: np.random.Generator, n: int) -> list[DenseSet]:
    space = random_subspace(n, int(rng.integers(0, n + 1)), rng)
    ys = [int(rng.integers(0, 1 << n)) for _ in range(3)]
    ys.append(ys[0] ^ ys[1] ^ ys[2])
    return [space.coset(y) for y in ys]


def suite_flatness(budget: int = 100, seed: int = 0) -> SuiteResult:
    out = SuiteResult("flatness")
    rng = np.random.default_rng(seed)
    for t in range(budget):
        n = int(rng.integers(2, 9))
        quad = _coset_quadruple(rng, n)
        k = Fraction(int(rng.integers(1, 20)), 1)
        rep = coherent_flatness(quad, KParam.from_rational(k))
        out.check(rep.is_flat, case="cosets of one subspace are flat", trial=t)
        lam = np.flatnonzero(rep.lambda_mask).tolist()
        out.check(is_closed_under_addition(lam, n), case="Lambda closed", trial=t)
        sets = [_random_set(rng, n) for _ in range(4)]
        shifts = [int(rng.integers(0, 1 << n)) for _ in range(4)]
        out.check(flatness_invariance_check(sets, shifts, KParam.from_rational(k)), case="translation invariance", trial=t)
    return out


def suite_extraction(budget: int = 100, seed: int = 0) -> SuiteResult:
    out = SuiteResult("extraction")
    rng = np.random.default_rng(seed)
    for t in range(budget):
        n = int(rng.integers(2, 11))
        quad = _coset_quadruple(rng, n)
        try:
            cert = extract_flat(quad, KParam.from_rational(Fraction(1)))
            ok = all(cert.checks.values()) and cert.intersections == tuple(len(s) for s in quad)
        except GF2StructError as exc:
            ok = False
            out.failures.append({"case": "coset quadruple", "trial": t, "error": repr(exc)})
        out.check(ok, case="coset quadruple extraction", trial=t)
    return out


def suite_pipelines(budget: int = 5, seed: int = 0) -> SuiteResult:
    out = SuiteResult("pipelines")
    for family, n, s in itertools.product(FAMILIES, (6, 8), range(budget)):
        a = generate(GeneratorSpec(family, n, seed + s))
        try:
            res = freiman_pipeline(a, a)
            ok = res.passed
        except GF2StructError as exc:
            ok = False
            out.failures.append({"case": "freiman", "family": family, "dim": n, "seed": seed + s, "error": repr(exc)})
        out.check(ok, case="freiman certificate", family=family, dim=n, seed=seed + s)
        e = energy(a, a, a, a)
        k = e.inverse_ceiling()
        try:
            ok = bsg_pipeline((a, a, a, a), k).passed
        except GF2StructError as exc:
            ok = False
            out.failures.append({"case": "bsg", "family": family, "dim": n, "seed": seed + s, "error": repr(exc)})
        out.check(ok, case="bsg certificate", family=family, dim=n, seed=seed + s)
    return out


def run_suite(name: str, budget: int | None = None, seed: int = 0) -> SuiteResult:
    funcs = {
        "fourier": suite_fourier,
        "energy": suite_energy,
        "analytic": suite_analytic,
        "flatness": suite_flatness,
        "extraction": suite_extraction,
        "pipelines": suite_pipelines,
    }
    if name not in funcs:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
    if budget is None:
        return funcs[name](seed=seed)
    return funcs[name](budget=budget, seed=seed)
