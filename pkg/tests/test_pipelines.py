from fractions import Fraction

import mpmath
import numpy as np
import pytest

from gf2struct.errors import DecrementUnavailable, IncrementUnavailable, PreconditionLowEnergy
from gf2struct.exact import KParam
from gf2struct.flatness import coherent_flatness
from gf2struct.generators import GeneratorSpec, generate
from gf2struct.gf2 import DenseSet, Subspace, slice_set
from gf2struct.pipelines import (
    bsg_pipeline,
    doubling_budget,
    doubling_decrement_step,
    energy_budget,
    energy_increment_step,
    freiman_pipeline,
    single_set_bsg,
    single_set_freiman,
)
from gf2struct.stats import brute_energy, doubling, energy

from conftest import random_set

mpmath.mp.dps = 60


def mp_dbl(a, b):
    return mpmath.mpf(doubling(a, b).sumset_size) / mpmath.sqrt(a.cardinality * b.cardinality)


def mp_omega(sets):
    count = brute_energy(*sets)
    return mpmath.mpf(count) / mpmath.mpf(np.prod([s.cardinality for s in sets], dtype=object)) ** mpmath.mpf(0.75)


def witness_of(sets, k):
    report = coherent_flatness(sets, k)
    return None if report.is_flat else report.witness


def h0_union(n=8, rank=4, t=1 << 7):
    h0 = Subspace(n, tuple(1 << i for i in range(rank)))
    return h0, h0.as_set().union(h0.coset(t))


def test_budgets():
    assert doubling_budget(KParam.from_rational(1)) == 201
    assert doubling_budget(KParam.from_rational(4)) == 401
    assert energy_budget(KParam.from_rational(1)) == 1
    assert energy_budget(KParam.from_rational(Fraction(3, 2))) == 5001


def test_doubling_step_on_noisy_coset_union():
    # a single stray point leaves the union flat at the adaptive threshold;
    # a small cluster in a third coset does not
    _, a = h0_union()
    a = a.union(DenseSet.from_elements(8, [0b01100000 ^ i for i in range(4)]))
    k = doubling(a, a).as_k()
    xi = witness_of((a, a, a, a), k)
    assert xi is not None
    a2, b2, rec = doubling_decrement_step(a, a, xi)
    assert a2.issubset(a) and b2.issubset(a) and a2.cardinality and b2.cardinality
    before, after = mp_dbl(a, a), mp_dbl(a2, b2)
    assert after <= before - mpmath.sqrt(before) / 100
    assert rec.witness == xi and rec.measure_after < rec.measure_before
    # the chosen pair is the best of the four slice pairs
    pairs = [(slice_set(a, xi, i), slice_set(a, xi, j)) for i in (0, 1) for j in (0, 1)]
    assert after == min(mp_dbl(*p) for p in pairs if p[0].cardinality and p[1].cardinality)


def test_doubling_step_random_contract(rng):
    steps = 0
    for _ in range(200):
        n = int(rng.integers(3, 9))
        a, b = random_set(rng, n), random_set(rng, n)
        k = doubling(a, b).as_k()
        xi = witness_of((a, b, a, b), k)
        if xi is None:
            continue
        a2, b2, _ = doubling_decrement_step(a, b, xi)
        steps += 1
        before = mp_dbl(a, b)
        assert a2.issubset(a) and b2.issubset(b)
        assert mp_dbl(a2, b2) <= before - mpmath.sqrt(before) / 100
    assert steps > 50


def test_doubling_step_rejects_non_witness():
    h = Subspace(5, (0b11, 0b100)).as_set()
    with pytest.raises(DecrementUnavailable):
        doubling_decrement_step(h, h, 0b1)


def test_energy_step_prunes_noise():
    h0 = Subspace(8, tuple(1 << i for i in range(4)))
    sets = [h0.as_set().union(DenseSet.from_elements(8, [p])) for p in (0x30, 0x50, 0x90, 0xA0)]
    k = energy(*sets).inverse()
    xi = witness_of(sets, k)
    assert xi is not None
    chosen, rec = energy_increment_step(sets, xi)
    assert all(c.issubset(s) and c.cardinality for c, s in zip(chosen, sets))
    before, after = mp_omega(sets), mp_omega(chosen)
    assert after > before
    assert after >= 1 / (1 / before - mpmath.mpf("1e-4"))
    assert sum(rec.slices) % 2 == 0


def test_energy_step_random_contract(rng):
    steps = 0
    for _ in range(200):
        n = int(rng.integers(3, 8))
        sets = [random_set(rng, n) for _ in range(4)]
        e = energy(*sets)
        if e.quadruple_count == 0:
            continue
        xi = witness_of(sets, e.inverse())
        if xi is None:
            continue
        chosen, _ = energy_increment_step(sets, xi)
        steps += 1
        before = mp_omega(sets)
        assert mp_omega(chosen) >= 1 / (1 / before - mpmath.mpf("1e-4"))
    assert steps > 50


def test_energy_step_on_flat_input():
    h = Subspace(4, (0b11,)).as_set()
    with pytest.raises(IncrementUnavailable):
        energy_increment_step([h] * 4, 0b1)


def check_freiman(res, a, b):
    h = res.h.elements()
    x, y = res.translates
    ia = int(np.count_nonzero(a.occupancy[h ^ x]))
    ib = int(np.count_nonzero(b.occupancy[h ^ y]))
    assert (ia, ib) == res.intersections
    k0 = mp_dbl(a, b)
    assert mpmath.sqrt(ia * ib) >= res.h_size / (2 * k0) * (1 - mpmath.mpf(10) ** -40)
    assert res.trace.iterations <= res.trace.budget


def test_freiman_affine():
    a = generate(GeneratorSpec("affine", 8, seed=3))
    res = freiman_pipeline(a, a)
    assert res.trace.iterations == 0 and res.passed
    assert res.intersections == (res.h_size, res.h_size)
    assert res.k == KParam.from_rational(1)
    check_freiman(res, a, a)


def test_freiman_coset_union():
    h0, a = h0_union()
    assert doubling(a, a).squared == 1
    res = freiman_pipeline(a, a)
    assert res.passed
    assert 2 * res.intersections[0] >= res.h_size
    check_freiman(res, a, a)


def test_freiman_basis_plus_zero():
    a = DenseSet.from_elements(8, [0] + [1 << i for i in range(8)])
    res = freiman_pipeline(a, a)
    assert res.passed and res.trace.iterations <= res.trace.budget
    check_freiman(res, a, a)


def test_single_set_freiman_examples(rng):
    e4 = DenseSet.from_elements(6, [1 << i for i in range(4)])
    res = single_set_freiman(e4)
    assert res.k == KParam.from_rational(Fraction(7, 4)) and res.passed
    (ia,) = res.intersections
    assert ia * 2 * 1.75 >= res.h_size
    dense = generate(GeneratorSpec("random", 10, seed=7, density=0.5))
    res = single_set_freiman(dense)
    assert res.passed
    assert res.intersections[0] * 2 * mp_dbl(dense, dense) >= res.h_size


def test_freiman_random_pairs_and_fixed_k(rng):
    for _ in range(40):
        n = int(rng.integers(2, 9))
        a, b = random_set(rng, n), random_set(rng, n)
        for fixed in (False, True):
            res = freiman_pipeline(a, b, fixed_k=fixed)
            assert res.passed and res.fixed_k is fixed
            check_freiman(res, a, b)


def check_bsg(res, sets, k):
    h = res.h.elements()
    inter = [int(np.count_nonzero(s.occupancy[h ^ x])) for s, x in zip(sets, res.translates)]
    assert tuple(inter) == res.intersections
    assert mpmath.mpf(np.prod(inter, dtype=object)) * (2 * mpmath.mpf(Fraction(k).numerator) / Fraction(k).denominator) ** 4 >= res.h_size**4


def test_bsg_subspace_and_cosets():
    h0 = Subspace(7, (0b11, 0b1100, 0b110000))
    res = bsg_pipeline([h0.as_set()] * 4, 1)
    assert res.trace.iterations == 0 and res.h == h0
    assert res.intersections == (8,) * 4
    ys = (0b1000000, 0b0000001, 0b0000100, 0b1000101)
    sets = [h0.coset(y) for y in ys]
    assert brute_energy(*sets) == 8**3
    res = bsg_pipeline(sets, 1)
    assert res.h == h0 and res.translates == tuple(h0.reduce(y) for y in ys)
    check_bsg(res, sets, 1)


def test_bsg_single_set_noise():
    h0 = Subspace(10, tuple(1 << i for i in range(5)))
    a = h0.as_set().union(DenseSet.from_elements(10, [0x0A0, 0x140, 0x280, 0x300]))
    k = energy(a, a, a, a).inverse_ceiling()
    res = single_set_bsg(a, k)
    assert res.passed
    (ia,) = res.intersections
    assert ia * 2 * k >= res.h_size


def test_bsg_low_energy_rejected():
    e = [DenseSet.from_elements(6, [1 << i for i in range(6)])] * 4
    with pytest.raises(PreconditionLowEnergy):
        bsg_pipeline(e, Fraction(1))


def test_bsg_random_and_fixed_k(rng):
    done = 0
    for _ in range(60):
        n = int(rng.integers(2, 8))
        sets = [random_set(rng, n, float(rng.uniform(0.3, 0.9))) for _ in range(4)]
        e = energy(*sets)
        if e.quadruple_count == 0 or e.omega < 0.25:
            continue
        k = e.inverse_ceiling()
        for fixed in (False, True):
            res = bsg_pipeline(sets, k, fixed_k=fixed)
            assert res.passed
            check_bsg(res, sets, k)
        done += 1
    assert done > 10


def test_determinism():
    a = generate(GeneratorSpec("subspace_plus_noise", 9, seed=11))
    first = freiman_pipeline(a, a).to_json()
    second = freiman_pipeline(a, a).to_json()
    assert first == second
