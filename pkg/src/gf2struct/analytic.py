"""The real functions F and G that drive the refinement steps, and the
near-extremum dichotomies they satisfy.

These are evaluated in binary64.  They only decide which combinatorial branch
a pipeline explores; every pipeline output is re-verified exactly.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

RADIUS_TOLERANCE = 1e-9

# The eight parity-zero labellings (j1, j2, j3, j4) with j1 + j2 + j3 + j4 = 0.
EVEN_LABELS: tuple[tuple[int, int, int, int], ...] = tuple(
    js for js in itertools.product((0, 1), repeat=4) if sum(js) % 2 == 0
)


class Branch(enum.Enum):
    NEAR_HALF = "near_half"
    NEAR_ENDPOINTS = "near_endpoints"
    HYPOTHESIS_FAILS = "hypothesis_fails"
    # The hypothesis holds but neither conclusion does: a counterexample.
    NEITHER = "neither"


@dataclass(frozen=True)
class Dichotomy:
    branch: Branch
    value: float  # max of the F values, or the G value


def _unit(*xs: float) -> None:
    for x in xs:
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"argument {x!r} outside [0, 1]")


def F(x: float, y: float) -> float:
    """sqrt(x) * (sqrt(y) + sqrt(1 - y))."""
    _unit(x, y)
    return float(f_values(np.float64(x), np.float64(y)))


def f_values(x, y):
    """Vectorised F without domain checks."""
    return np.sqrt(x) * (np.sqrt(y) + np.sqrt(1.0 - y))


def G(a1: float, a2: float, a3: float, a4: float) -> float:
    """Sum over even labellings j of prod_i alpha_{i, j_i}^(3/4)."""
    _unit(a1, a2, a3, a4)
    return float(g_values(np.array([a1, a2, a3, a4], dtype=np.float64)))


def g_values(alphas: np.ndarray) -> np.ndarray:
    """Vectorised G over the last axis (length 4) without domain checks."""
    alphas = np.asarray(alphas, dtype=np.float64)
    pw = np.stack([alphas**0.75, (1.0 - alphas) ** 0.75], axis=-1)
    total = np.zeros(alphas.shape[:-1])
    for js in EVEN_LABELS:
        term = np.ones(alphas.shape[:-1])
        for i, j in enumerate(js):
            term = term * pw[..., i, j]
        total = total + term
    return total


def f_hypothesis_values(alpha, beta, symmetric: bool = True):
    """The F values constrained by the near-minimum hypothesis.

    With ``symmetric`` (the default) this is the closure of the four listed
    values under alpha <-> 1-alpha, beta <-> 1-beta and alpha <-> beta.  The
    literal list F(a,b), F(1-a,b), F(b,a), F(b,1-a) contains F(b,a) twice
    (F is symmetric in y <-> 1-y) and misses F(1-b, a).
    """
    a, b = np.asarray(alpha, dtype=np.float64), np.asarray(beta, dtype=np.float64)
    if not symmetric:
        return np.stack([f_values(a, b), f_values(1 - a, b), f_values(b, a), f_values(b, 1 - a)])
    vals = []
    for x in (a, 1 - a):
        for y in (b, 1 - b):
            vals.append(f_values(x, y))
            vals.append(f_values(y, x))
    return np.stack(vals)


def classify_f(alpha, beta, eps, symmetric: bool = True, tol: float = RADIUS_TOLERANCE):
    """Vectorised branch codes for the F dichotomy; see near_minima_F_dichotomy."""
    a, b = np.asarray(alpha, dtype=np.float64), np.asarray(beta, dtype=np.float64)
    peak = f_hypothesis_values(a, b, symmetric).max(axis=0)
    holds = peak <= 1.0 + eps
    half = (np.abs(a - 0.5) <= 4 * eps + tol) & (np.abs(b - 0.5) <= 4 * eps + tol)
    ends = (np.minimum(a, 1 - a) <= 2 * eps + tol) & (np.minimum(b, 1 - b) <= 2 * eps + tol)
    return holds, half, ends, peak


def near_minima_F_dichotomy(alpha: float, beta: float, eps: float, symmetric: bool = True) -> Dichotomy:
    """Which side of the near-minimum dichotomy for F the pair (alpha, beta) is on.

    If every hypothesis value is at most 1 + eps, both arguments must be within
    4 eps of 1/2 or both within 2 eps of {0, 1}.  Otherwise HYPOTHESIS_FAILS is
    returned with the largest F value.
    """
    _unit(alpha, beta)
    if not 0.0 < eps <= 0.01:
        raise DomainError("eps must lie in (0, 1/100]")
    holds, half, ends, peak = (bool(v) if v.dtype == bool else float(v)
                               for v in classify_f(alpha, beta, eps, symmetric))
    if not holds:
        return Dichotomy(Branch.HYPOTHESIS_FAILS, peak)
    if half:
        return Dichotomy(Branch.NEAR_HALF, peak)
    if ends:
        return Dichotomy(Branch.NEAR_ENDPOINTS, peak)
    return Dichotomy(Branch.NEITHER, peak)


def classify_g(alphas: np.ndarray, eps: float, tol: float = RADIUS_TOLERANCE):
    """Vectorised branch codes for the G dichotomy over rows of ``alphas``."""
    alphas = np.asarray(alphas, dtype=np.float64)
    g = g_values(alphas)
    holds = g >= 1.0 - eps
    half = np.all(np.abs(alphas - 0.5) <= 3 * np.sqrt(eps) + tol, axis=-1)
    ends = np.all(np.minimum(alphas, 1 - alphas) <= 10 * eps + tol, axis=-1)
    return holds, half, ends, g


def near_maxima_G_dichotomy(a1: float, a2: float, a3: float, a4: float, eps: float) -> Dichotomy:
    """If G >= 1 - eps then all alphas are within 3 sqrt(eps) of 1/2, or all
    are within 10 eps of an endpoint."""
    _unit(a1, a2, a3, a4)
    if not 0.0 < eps <= 0.001:
        raise DomainError("eps must lie in (0, 1/1000]")
    holds, half, ends, g = classify_g(np.array([a1, a2, a3, a4]), eps)
    g = float(g)
    if not holds:
        return Dichotomy(Branch.HYPOTHESIS_FAILS, g)
    if half:
        return Dichotomy(Branch.NEAR_HALF, g)
    if ends:
        return Dichotomy(Branch.NEAR_ENDPOINTS, g)
    return Dichotomy(Branch.NEITHER, g)
