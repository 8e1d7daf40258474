"""
Guesser Service for FeketeLab.
Minimal algebraic-approximation degree of a truncated power series (d_p(N)
for Fekete series) and a P-recurrence guesser, both by exact nullspaces.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from services import power_series
from services.exact_poly import BiPoly, UniPoly, to_scalar
from services.holonomy import PRecurrence
from services.linear_algebra import bareiss_kernel
from services.number_theory import as_modulus, fekete_coefficients
from services.oscillation import theorem_reference
from services.schemas import AlgebraicGuessModel, DpnResult, scalar_to_json

logger = logging.getLogger(__name__)

# Extra equations demanded beyond the unknown count when guessing recurrences
RECURRENCE_SAFETY_MARGIN = 10


class GuesserError(Exception):
    """Base guesser error."""
    pass


class InsufficientDataError(GuesserError):
    """Too few terms for the requested ansatz."""
    pass


@dataclass(frozen=True)
class AlgebraicGuess:
    """h with deg_X h, deg_Y h <= d and h(X, G) = 0 mod X^residual_order."""
    h: BiPoly
    per_variable_degree: int
    residual_order: int

    @property
    def total_degree(self) -> int:
        return self.h.total_degree

    def to_model(self) -> AlgebraicGuessModel:
        return AlgebraicGuessModel(
            per_variable_degree=self.per_variable_degree,
            residual_order=self.residual_order,
            total_degree=self.total_degree,
            h=[[scalar_to_json(c) for c in row] for row in self.h.to_grid()],
        )


def _validate_prefix(prefix: list) -> list:
    values = [to_scalar(c) for c in prefix]
    if len(values) < 2:
        raise GuesserError("series prefix needs at least two coefficients")
    return values


def algebraic_system(prefix: list, d: int) -> list[list]:
    """
    Rows [X^k] sum c_{i,j} X^i G^j = 0 for k < N.

    Unknown c_{i,j} (X-degree i, Y-degree j) sits in column i*(d+1) + j.
    """
    n = len(prefix)
    powers = [[Fraction(1)] + [Fraction(0)] * (n - 1)]
    for _ in range(d):
        powers.append(power_series.mul(powers[-1], prefix, n))
    width = d + 1
    rows = []
    for k in range(n):
        row = [Fraction(0)] * (width * width)
        for i in range(min(d, k) + 1):
            for j in range(width):
                row[i * width + j] = powers[j][k - i]
        rows.append(row)
    return rows


def _vector_to_bipoly(vector: list, d: int) -> BiPoly:
    width = d + 1
    return BiPoly.from_dict({(i, j): vector[i * width + j]
                             for i in range(width) for j in range(width) if vector[i * width + j]})


def guess_algebraic(prefix: list, d: int) -> Optional[AlgebraicGuess]:
    """
    Nonzero h with deg_X h, deg_Y h <= d killing the prefix, or None.

    Among kernel basis vectors the one with the smallest total degree wins,
    ties by lexicographic coefficient order.
    """
    if d < 1:
        raise GuesserError(f"degree must be positive, got {d}")
    prefix = _validate_prefix(prefix)
    width = d + 1
    kernel = bareiss_kernel(algebraic_system(prefix, d), width * width)
    if not kernel:
        logger.debug(f"guess_algebraic: trivial kernel for N={len(prefix)}, d={d}")
        return None

    candidates = [(_vector_to_bipoly(v, d), v) for v in kernel]
    h, _ = min(candidates, key=lambda item: (item[0].total_degree, item[1]))

    # Independent recheck by Horner evaluation of h(X, G).
    residue = power_series.evaluate_bipoly(h, prefix, len(prefix))
    residual_order = power_series.valuation(residue)
    if h.is_zero or residual_order < len(prefix):
        raise GuesserError(f"kernel vector fails the evaluation recheck: {h}")
    return AlgebraicGuess(h=h, per_variable_degree=d, residual_order=residual_order)


def counting_cap(n: int) -> int:
    """Smallest d with (d+1)^2 > n."""
    return max(1, math.isqrt(n))


def min_algebraic_degree(prefix: list) -> tuple[int, AlgebraicGuess]:
    """Smallest d admitting an annihilator; never exceeds the counting cap."""
    prefix = _validate_prefix(prefix)
    cap = counting_cap(len(prefix))
    for d in range(1, cap + 1):
        guess = guess_algebraic(prefix, d)
        if guess is not None:
            return d, guess
    raise GuesserError(f"no annihilator up to the counting cap d = {cap}")


def compute_dpn(p, n: int) -> tuple[int, AlgebraicGuess, DpnResult]:
    """
    d_p(N) for the Fekete series of p with its witness and report row.

    N >= p is outside the intended regime; it is computed but flagged.
    """
    p = as_modulus(p).p
    if n < 1:
        raise GuesserError(f"N must be positive, got {n}")
    if n >= p:
        logger.warning(f"compute_dpn: N = {n} >= p = {p}, outside the N < p regime")
    prefix = fekete_coefficients(p, n)
    if n == 1:
        # A single coefficient is matched by the constant Y - A_0.
        guess = AlgebraicGuess(h=BiPoly.from_dict({(0, 1): 1, (0, 0): -prefix[0]}),
                               per_variable_degree=1, residual_order=1)
        d = 1
    else:
        d, guess = min_algebraic_degree(prefix)

    reference = theorem_reference(p, n)
    chain = d ** 10 * (math.sqrt(p) * math.log(p) + d ** 4)
    result = DpnResult(
        p=p,
        N=n,
        d=d,
        witness_h=guess.to_model().h,
        witness_total_degree=guess.total_degree,
        theorem_reference_value=reference,
        reference_ratio=d / reference,
        chain_shape=chain,
        chain_shape_exceeds_n=chain >= n,
        n_at_least_p=n >= p,
    )
    logger.debug(f"d_{p}({n}) = {d}")
    return d, guess, result


def guess_recurrence(terms: list, order: int, degree: int) -> Optional[PRecurrence]:
    """
    Exact P-recurrence of order <= `order` and coefficient degree <= `degree`.

    Raises:
        InsufficientDataError: fewer than (L+1)(D+1) + L + 10 terms
    """
    terms = [to_scalar(t) for t in terms]
    needed = (order + 1) * (degree + 1) + order + RECURRENCE_SAFETY_MARGIN
    if len(terms) < needed:
        raise InsufficientDataError(f"need at least {needed} terms, got {len(terms)}")

    width = degree + 1
    ncols = (order + 1) * width
    rows = []
    for n in range(len(terms) - order):
        row = [Fraction(0)] * ncols
        for j in range(order + 1):
            for e in range(width):
                row[j * width + e] = terms[n + j] * n ** e
        rows.append(row)
    kernel = bareiss_kernel(rows, ncols)
    if not kernel:
        return None

    def shape(vector):
        polys = [UniPoly(vector[j * width:(j + 1) * width]) for j in range(order + 1)]
        while polys and polys[-1].is_zero:
            polys.pop()
        return (len(polys), max(p.degree for p in polys), vector), polys

    _, polys = min((shape(v) for v in kernel), key=lambda item: item[0])
    return PRecurrence(tuple(polys))
