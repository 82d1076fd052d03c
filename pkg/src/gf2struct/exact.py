"""Exact arithmetic helpers: rational roots and signs of sums of radicals.

Every inequality a certificate depends on is decided here without floating
point.  Quantities like ``K = Dbl(A, B)`` or ``K = 1/omega`` are irrational in
general, but some power of two of them is rational, so ``K`` is carried by its
exact fourth power (:class:`KParam`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction | int

# (coefficient, radicand, index): the real number coefficient * radicand ** (1 / index)
Term = tuple[Rational, Rational, int]

_SYMPY_CHECK_PRECISION = 512
_MAX_PRECISION = 1 << 16


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"``, an integer, or a decimal literal into an exact Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact rational: {text!r}") from exc


def format_rational(value: Rational) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _check_index(k: int) -> None:
    if k < 1 or k & (k - 1):
        raise ValueError(f"root index must be a power of two, got {k}")


def iroot_floor(m: int, k: int) -> int:
    """floor(m ** (1/k)) for a non-negative integer and a power-of-two index."""
    _check_index(k)
    if m < 0:
        raise ValueError("negative radicand")
    while k > 1:
        m = math.isqrt(m)
        k //= 2
    return m


def exact_root(value: Rational, k: int) -> Fraction | None:
    """Return value ** (1/k) if it is rational, else None."""
    value = Fraction(value)
    if value < 0:
        raise ValueError("negative radicand")
    p = iroot_floor(value.numerator, k)
    q = iroot_floor(value.denominator, k)
    if p**k == value.numerator and q**k == value.denominator:
        return Fraction(p, q)
    return None


def floor_root(value: Rational, k: int) -> int:
    value = Fraction(value)
    return iroot_floor(value.numerator // value.denominator, k)


def ceil_root(value: Rational, k: int) -> int:
    """Smallest integer m >= 0 with m ** k >= value."""
    value = Fraction(value)
    if value <= 0:
        return 0
    m = floor_root(value, k)
    return m if m**k >= value else m + 1


def _term_interval(term: Term, precision: int) -> tuple[Fraction, Fraction]:
    coef, radicand, k = Fraction(term[0]), Fraction(term[1]), term[2]
    scaled = (radicand.numerator << (precision * k)) // radicand.denominator
    low = Fraction(iroot_floor(scaled, k), 1 << precision)
    high = low + Fraction(1, 1 << precision)
    if coef >= 0:
        return coef * low, coef * high
    return coef * high, coef * low


def _sympy_is_zero(terms: Sequence[Term]) -> bool:
    import sympy

    x = sympy.Symbol("x")
    expr = sympy.Add(
        *(
            sympy.Rational(Fraction(c).numerator, Fraction(c).denominator)
            * sympy.Rational(Fraction(r).numerator, Fraction(r).denominator) ** sympy.Rational(1, k)
            for c, r, k in terms
        )
    )
    if expr == 0:
        return True
    return sympy.minimal_polynomial(expr, x) == x


def radical_sign(terms: Iterable[Term]) -> int:
    """Exact sign (-1, 0, 1) of sum(c * r ** (1/k)) over the given terms.

    Radicands must be non-negative rationals and indices powers of two.  The
    sign is found by interval bounds of doubling precision; an exact
    algebraic zero test runs once the intervals fail to separate from zero.
    """
    terms = [(Fraction(c), Fraction(r), int(k)) for c, r, k in terms if c != 0]
    for _, r, k in terms:
        _check_index(k)
        if r < 0:
            raise ValueError("negative radicand")
    roots = [exact_root(r, k) for _, r, k in terms]
    if all(root is not None for root in roots):
        total = sum((c * root for (c, _, _), root in zip(terms, roots)), Fraction(0))
        return (total > 0) - (total < 0)

    precision = 64
    zero_checked = False
    while precision <= _MAX_PRECISION:
        low = high = Fraction(0)
        for term in terms:
            lo, hi = _term_interval(term, precision)
            low += lo
            high += hi
        if low > 0:
            return 1
        if high < 0:
            return -1
        if precision >= _SYMPY_CHECK_PRECISION and not zero_checked:
            if _sympy_is_zero(terms):
                return 0
            zero_checked = True
        precision *= 2
    raise ArithmeticError("radical sign undecided at maximum precision")


@dataclass(frozen=True)
class KParam:
    """A real parameter K >= 1 stored exactly through its fourth power."""

    fourth: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "fourth", Fraction(self.fourth))
        if self.fourth < 1:
            raise ValueError(f"K must be >= 1 (K^4 = {self.fourth})")

    @classmethod
    def from_rational(cls, k: Rational) -> "KParam":
        return cls(Fraction(k) ** 4)

    @classmethod
    def from_square(cls, k_squared: Rational) -> "KParam":
        return cls(Fraction(k_squared) ** 2)

    def rational(self) -> Fraction | None:
        return exact_root(self.fourth, 4)

    def square(self) -> Fraction | None:
        return exact_root(self.fourth, 2)

    def __float__(self) -> float:
        return float(self.fourth) ** 0.25

    def __le__(self, other: "KParam") -> bool:
        return self.fourth <= other.fourth

    def __lt__(self, other: "KParam") -> bool:
        return self.fourth < other.fourth

    def to_json(self) -> dict:
        out = {"K_fourth": format_rational(self.fourth)}
        sq = self.square()
        if sq is not None:
            out["K_squared"] = format_rational(sq)
        return out
