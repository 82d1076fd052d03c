import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gf2struct.errors import DimensionMismatch, EmptySet, TooLarge
from gf2struct.exact import KParam
from gf2struct.gf2 import DenseSet, Subspace
from gf2struct.stats import (
    EnergyValue,
    brute_energy,
    cauchy_schwarz_bound,
    doubling,
    energy,
    exact_dot,
    pair_energy,
    sumset,
)

from conftest import random_set, same_dim_sets


def basis_vectors(n, m):
    return DenseSet.from_elements(n, [1 << i for i in range(m)])


def literal_sumset(a, b):
    return {x ^ y for x in a.elements().tolist() for y in b.elements().tolist()}


def literal_count(*sets):
    a1, a2, a3, a4 = (s.elements().tolist() for s in sets)
    four = set(a4)
    return sum(1 for x, y, z in itertools.product(a1, a2, a3) if x ^ y ^ z in four)


def test_sumset_examples():
    h = Subspace(6, (0b000011, 0b001100)).as_set()
    assert sumset(h, h) == h
    h0 = Subspace(8, (0b1, 0b10, 0b100, 0b1000))
    a = h0.as_set().union(h0.coset(0b10000000))
    assert sumset(a, a) == a
    e4 = basis_vectors(6, 4)
    assert sumset(e4, e4).cardinality == 7 == len(literal_sumset(e4, e4))


def test_sumset_errors():
    with pytest.raises(EmptySet):
        sumset(DenseSet.empty(3), DenseSet.full(3))
    with pytest.raises(DimensionMismatch):
        sumset(DenseSet.full(3), DenseSet.full(4))


@given(same_dim_sets(2, max_dim=7))
def test_sumset_matches_double_loop(sets):
    a, b = sets
    s = sumset(a, b)
    assert set(s.elements().tolist()) == literal_sumset(a, b)
    assert s.cardinality >= max(a.cardinality, b.cardinality)


def test_doubling_examples():
    h = Subspace(5, (0b10001, 0b00110)).as_set()
    assert doubling(h, h).squared == 1
    assert doubling(DenseSet.full(4), DenseSet.full(4)).squared == 1
    d = doubling(basis_vectors(5, 4), basis_vectors(5, 4))
    assert d.squared == Fraction(49, 16)
    assert abs(float(d) - 1.75) < 1e-15
    assert d.as_k() == KParam.from_rational(Fraction(7, 4))


@given(same_dim_sets(2, max_dim=8))
def test_doubling_bounds(sets):
    assert doubling(*sets).satisfies_bounds()


def test_energy_examples():
    h = Subspace(7, (0b1000001, 0b0110000, 0b0000110)).as_set()
    e = energy(h, h, h, h)
    assert e.quadruple_count == h.cardinality**3
    assert e.omega_fourth() == 1
    for m in range(1, 9):
        a = basis_vectors(8, m)
        count = energy(a, a, a, a).quadruple_count
        assert count == 3 * m * m - 2 * m
        if m <= 5:
            assert count == literal_count(a, a, a, a)
    e4 = energy(*[basis_vectors(4, 4)] * 4)
    assert e4.quadruple_count == 40
    assert e4.omega_fourth() == Fraction(40**4, 64**4)


def test_brute_energy_singletons():
    s = lambda v: DenseSet.from_elements(4, [v])
    assert brute_energy(s(3), s(5), s(9), s(3 ^ 5 ^ 9)) == 1
    assert brute_energy(s(3), s(5), s(9), s(0)) == 0
    big = DenseSet.full(10)
    with pytest.raises(TooLarge):
        brute_energy(big, big, big, big)


@settings(max_examples=60)
@given(same_dim_sets(4, max_dim=6))
def test_energy_matches_brute(sets):
    e = energy(*sets)
    assert e.quadruple_count == brute_energy(*sets) == literal_count(*sets)
    assert e.within_unit_interval()
    assert 0 <= e.omega <= 1 + 1e-12


def test_energy_matches_brute_random(rng):
    for _ in range(150):
        n = int(rng.integers(1, 9))
        sets = [random_set(rng, n, float(rng.uniform(0.01, 0.3))) for _ in range(4)]
        assert energy(*sets).quadruple_count == brute_energy(*sets)


@given(same_dim_sets(4, max_dim=6), st.permutations(range(4)))
def test_energy_permutation_symmetry(sets, perm):
    base = energy(*sets)
    permuted = energy(*[sets[i] for i in perm])
    assert permuted.quadruple_count == base.quadruple_count
    assert permuted.compare(base) == 0


@given(same_dim_sets(4, max_dim=6), st.data())
def test_energy_pair_translation(sets, data):
    n = sets[0].dim
    t = data.draw(st.integers(0, (1 << n) - 1))
    i, j = data.draw(st.sampled_from(list(itertools.combinations(range(4), 2))))
    moved = list(sets)
    moved[i] = moved[i].translate(t)
    moved[j] = moved[j].translate(t)
    assert energy(*moved).quadruple_count == energy(*sets).quadruple_count


def test_energy_comparisons():
    e = EnergyValue(40, (4, 4, 4, 4))
    assert e.at_least_inverse(KParam.from_rational(Fraction(8, 5)))
    assert not e.at_least_inverse(KParam.from_rational(Fraction(159, 100)))
    assert e.inverse_ceiling() == Fraction(160, 100)
    assert e.inverse() == KParam.from_rational(Fraction(8, 5))
    assert EnergyValue(41, (4, 4, 4, 4)).compare(e) == 1


def test_exact_dot_large_values(rng):
    a = rng.integers(-(1 << 47), 1 << 47, size=50_000)
    b = rng.integers(-(1 << 47), 1 << 47, size=50_000)
    assert exact_dot(a, b) == sum(int(x) * int(y) for x, y in zip(a, b))


def test_cauchy_schwarz_examples(rng):
    h = Subspace(6, (0b11, 0b1100)).as_set()
    bound = cauchy_schwarz_bound(h, h)
    assert bound.quadruple_count * bound.sumset_size == h.cardinality**4
    assert abs(bound.omega - 1) < 1e-12 and abs(bound.lower_bound - 1) < 1e-12
    e4 = basis_vectors(5, 4)
    bound = cauchy_schwarz_bound(e4, e4)
    assert bound.quadruple_count == 40 and bound.sumset_size == 7
    assert abs(bound.omega - 0.625) < 1e-12 and abs(bound.lower_bound - 4 / 7) < 1e-12
    for _ in range(200):
        n = int(rng.integers(1, 11))
        cauchy_schwarz_bound(random_set(rng, n), random_set(rng, n))


@given(same_dim_sets(1, max_dim=7))
def test_pair_histogram_energy(sets):
    (a,) = sets
    assert pair_energy(a) == brute_energy(a, a, a, a) == energy(a, a, a, a).quadruple_count
