"""
Truncated power series arithmetic for FeketeLab.
Dense coefficient lists (lowest order first) over exact scalars, truncated
modulo X^n.
"""

from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Optional

from services.exact_poly import BiPoly, GaussianRational, UniPoly, to_scalar


def truncate(series: list, n: int) -> list:
    values = list(series[:n])
    return values + [Fraction(0)] * (n - len(values))


def add(a: list, b: list, n: int) -> list:
    a, b = truncate(a, n), truncate(b, n)
    return [to_scalar(x + y) for x, y in zip(a, b)]


def sub(a: list, b: list, n: int) -> list:
    a, b = truncate(a, n), truncate(b, n)
    return [to_scalar(x - y) for x, y in zip(a, b)]


def _integer_form(values: list) -> Optional[tuple[list[int], int]]:
    """(numerators, common denominator) for real series, None when a value is Gaussian."""
    if any(isinstance(v, GaussianRational) for v in values):
        return None
    fractions = [Fraction(v) for v in values]
    common = reduce(lcm, (v.denominator for v in fractions), 1)
    return [v.numerator * (common // v.denominator) for v in fractions], common


def mul(a: list, b: list, n: int) -> list:
    a, b = a[:n], b[:n]
    left, right = _integer_form(a), _integer_form(b)
    if left is not None and right is not None:
        (xs, da), (ys, db) = left, right
        result = [0] * n
        for i, x in enumerate(xs):
            if not x:
                continue
            for j, y in enumerate(ys[: n - i]):
                if y:
                    result[i + j] += x * y
        return [Fraction(v, da * db) for v in result]

    result = [Fraction(0)] * n
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b[: n - i]):
            if y:
                result[i + j] = result[i + j] + x * y
    return [to_scalar(v) for v in result]


def inverse(a: list, n: int) -> list:
    """1/a mod X^n; requires a[0] != 0."""
    if not a or not a[0]:
        raise ZeroDivisionError("series with zero constant term is not invertible")
    real = _integer_form(a[:n])
    if real is not None:
        # 1/A = sum R_k X^k / c^(k+1) with R_0 = 1, R_k = -sum_i A_i R_{k-i} c^(i-1)
        xs, common = real
        c = xs[0]
        powers = [1]
        for _ in range(n):
            powers.append(powers[-1] * c)
        numerators = [1]
        for k in range(1, n):
            total = sum(xs[i] * numerators[k - i] * powers[i - 1]
                        for i in range(1, min(k, len(xs) - 1) + 1))
            numerators.append(-total)
        return [Fraction(common * r, powers[k + 1]) for k, r in enumerate(numerators)]

    first = 1 / a[0]
    result = [to_scalar(first)]
    for k in range(1, n):
        total = sum((a[i] * result[k - i] for i in range(1, min(k, len(a) - 1) + 1)), Fraction(0))
        result.append(to_scalar(-total * first))
    return result


def derivative(a: list) -> list:
    return [to_scalar(k * c) for k, c in enumerate(a)][1:]


def from_poly(poly: UniPoly, n: int) -> list:
    return truncate(list(poly.coeffs), n)


def evaluate_bipoly(h: BiPoly, series: list, n: int) -> list:
    """h(X, G(X)) mod X^n by Horner's rule in Y."""
    result = [Fraction(0)] * n
    for poly in reversed(h.ycoeffs):
        result = add(mul(result, series, n), from_poly(poly, n), n)
    return result


def valuation(series: list) -> int:
    """Index of the first nonzero coefficient, or len(series) if all vanish."""
    return next((k for k, c in enumerate(series) if c), len(series))
