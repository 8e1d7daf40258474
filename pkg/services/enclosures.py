"""
Rational Enclosure Service for FeketeLab.
Certified rational bounds for e^k, square roots and moduli, so that bound
comparisons are never decided inside floating-point error.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, floor, isqrt

logger = logging.getLogger(__name__)

# Fixed enclosures quoted for e^2 and e^3.
E2_ENCLOSURE = (Fraction(7389056, 10**6), Fraction(7389057, 10**6))
E3_ENCLOSURE = (Fraction(20085536, 10**6), Fraction(20085537, 10**6))

SQRT_SCALE_BITS = 64
MAX_CEIL_DIGITS = 640


@dataclass(frozen=True)
class RationalInterval:
    """Closed interval [lower, upper] with exact rational endpoints."""
    lower: Fraction
    upper: Fraction

    @classmethod
    def point(cls, value) -> "RationalInterval":
        value = Fraction(value)
        return cls(value, value)

    def __add__(self, other):
        other = _as_interval(other)
        return RationalInterval(self.lower + other.lower, self.upper + other.upper)

    __radd__ = __add__

    def __neg__(self):
        return RationalInterval(-self.upper, -self.lower)

    def __sub__(self, other):
        return self + (-_as_interval(other))

    def __rsub__(self, other):
        return _as_interval(other) - self

    def __mul__(self, other):
        other = _as_interval(other)
        products = [self.lower * other.lower, self.lower * other.upper,
                    self.upper * other.lower, self.upper * other.upper]
        return RationalInterval(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_interval(other)
        if other.lower <= 0 <= other.upper:
            raise ZeroDivisionError("interval divisor contains zero")
        return self * RationalInterval(1 / other.upper, 1 / other.lower)

    def __pow__(self, exponent: int):
        result = RationalInterval.point(1)
        for _ in range(exponent):
            result = result * self
        return result

    def contains(self, value) -> bool:
        return self.lower <= value <= self.upper

    def certainly_below(self, value) -> bool:
        return self.upper < value

    def certainly_above(self, value) -> bool:
        return self.lower > value

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def __float__(self):
        return float((self.lower + self.upper) / 2)


def _as_interval(value) -> RationalInterval:
    if isinstance(value, RationalInterval):
        return value
    return RationalInterval.point(value)


@lru_cache(maxsize=64)
def exp_enclosure(k: int, digits: int = 30) -> RationalInterval:
    """
    Enclose e^k (k >= 0) by its Taylor series with a geometric tail bound.

    Args:
        k: nonnegative integer exponent
        digits: decimal digits of the returned endpoints

    Returns:
        RationalInterval with endpoints on the 10^-digits grid
    """
    if k < 0:
        raise ValueError("exp_enclosure expects k >= 0")
    target = Fraction(1, 10 ** (digits + 2))
    partial, term, n = Fraction(0), Fraction(1), 0
    while True:
        partial += term
        n += 1
        term = term * k / n
        # Once n + 1 > 2k the remaining terms shrink by at least 1/2 each.
        if n + 1 > 2 * k and 2 * term < target:
            break
    scale = 10 ** digits
    lower = Fraction(floor(partial * scale), scale)
    upper = Fraction(ceil((partial + 2 * term) * scale), scale)
    return RationalInterval(lower, upper)


def e_power(k: int, digits: int = 30) -> RationalInterval:
    """e^k with the fixed e^2 and e^3 enclosures intersected in."""
    interval = exp_enclosure(k, digits)
    fixed = {2: E2_ENCLOSURE, 3: E3_ENCLOSURE}.get(k)
    if fixed is None:
        return interval
    return RationalInterval(max(interval.lower, fixed[0]), min(interval.upper, fixed[1]))


def sqrt_bounds(value, scale_bits: int = SQRT_SCALE_BITS) -> RationalInterval:
    """Rational lower/upper bounds of sqrt(value) for value >= 0."""
    value = Fraction(value)
    if value < 0:
        raise ValueError("sqrt_bounds expects a nonnegative value")
    n, d = value.numerator, value.denominator
    scale = 1 << scale_bits
    radicand = n * d * scale * scale
    root = isqrt(radicand)
    lower = Fraction(root, d * scale)
    if root * root == radicand:
        return RationalInterval(lower, lower)
    return RationalInterval(lower, Fraction(root + 1, d * scale))


def abs_bounds(value) -> RationalInterval:
    """Enclosure of |value| for a Fraction or GaussianRational."""
    norm = Fraction(value.real) ** 2 + Fraction(value.imag) ** 2
    return sqrt_bounds(norm)


def certified_ceil(build) -> int:
    """
    Ceiling of a quantity known only through enclosures.

    Args:
        build: callable digits -> RationalInterval, tightening as digits grow

    Raises:
        ArithmeticError: if the enclosure straddles an integer at every precision
    """
    digits = 20
    while digits <= MAX_CEIL_DIGITS:
        interval = build(digits)
        lower, upper = ceil(interval.lower), ceil(interval.upper)
        if lower == upper:
            return lower
        logger.debug(f"Ceiling undecided at {digits} digits: {float(interval)}")
        digits *= 2
    raise ArithmeticError("could not certify ceiling; quantity may be an integer")
