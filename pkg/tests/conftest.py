import numpy as np
import pytest
from hypothesis import strategies as st

from gf2struct.gf2 import DenseSet


@st.composite
def dense_sets(draw, min_dim=1, max_dim=6, dim=None, min_size=1):
    n = dim if dim is not None else draw(st.integers(min_dim, max_dim))
    elements = draw(st.sets(st.integers(0, (1 << n) - 1), min_size=min_size, max_size=1 << n))
    return DenseSet.from_elements(n, elements)


@st.composite
def same_dim_sets(draw, count, min_dim=1, max_dim=6):
    n = draw(st.integers(min_dim, max_dim))
    return [draw(dense_sets(dim=n)) for _ in range(count)]


def random_set(rng: np.random.Generator, n: int, density: float | None = None) -> DenseSet:
    p = rng.random() if density is None else density
    occ = rng.random(1 << n) < p
    if not occ.any():
        occ[int(rng.integers(0, 1 << n))] = True
    return DenseSet(n, occ)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
