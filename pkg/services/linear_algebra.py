"""
Exact Linear Algebra Service for FeketeLab.
Fraction-free (Bareiss) elimination with content stripping, a modular rank
pre-screen and a plain Gauss-Jordan kernel used as an independent oracle.
"""

import logging
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Optional

logger = logging.getLogger(__name__)

# Mersenne prime used for rank pre-screening
SCREEN_PRIME = 2**61 - 1


def integer_rows(rows: list[list]) -> list[list[int]]:
    """Scale each rational row by its common denominator."""
    result = []
    for row in rows:
        values = [Fraction(v) for v in row]
        common = reduce(lcm, (v.denominator for v in values), 1)
        result.append([int(v * common) for v in values])
    return result


def primitive_vector(values: list[Fraction]) -> list[int]:
    """Primitive integer vector whose first nonzero entry is positive."""
    values = [Fraction(v) for v in values]
    common = reduce(lcm, (v.denominator for v in values), 1)
    ints = [int(v * common) for v in values]
    content = reduce(gcd, ints, 0) or 1
    ints = [v // content for v in ints]
    lead = next((v for v in ints if v), 0)
    return [-v for v in ints] if lead < 0 else ints


# ============================================================================
# Modular pre-screen
# ============================================================================

def rank_mod_prime(rows: list[list], ncols: int, prime: int = SCREEN_PRIME) -> Optional[int]:
    """
    Rank of the matrix reduced modulo `prime`, or None if a denominator vanishes there.

    The modular rank never exceeds the rational rank, so a full modular
    column rank certifies a trivial rational kernel.
    """
    matrix = []
    for row in rows:
        reduced = []
        for v in row:
            v = Fraction(v)
            if v.denominator % prime == 0:
                return None
            reduced.append(v.numerator * pow(v.denominator, -1, prime) % prime)
        matrix.append(reduced)

    rank = 0
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(matrix)) if matrix[i][c]), None)
        if pivot is None:
            continue
        matrix[rank], matrix[pivot] = matrix[pivot], matrix[rank]
        inverse = pow(matrix[rank][c], -1, prime)
        for i in range(rank + 1, len(matrix)):
            factor = matrix[i][c] * inverse % prime
            if factor:
                row, pivot_row = matrix[i], matrix[rank]
                for k in range(c, ncols):
                    row[k] = (row[k] - factor * pivot_row[k]) % prime
        rank += 1
        if rank == len(matrix):
            break
    return rank


# ============================================================================
# Bareiss elimination
# ============================================================================

def bareiss_echelon(rows: list[list], ncols: int, one=1) -> tuple[list[list], list[int]]:
    """
    Fraction-free row echelon form; columns without a pivot are skipped.

    Works over any integral domain with exact `//` (integers, Q[X]); `one`
    is the ring unit.

    Returns:
        (nonzero echelon rows, pivot column per row)
    """
    matrix = [list(row) for row in rows]
    nrows = len(matrix)
    previous = one
    zero = one - one
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pivot = next((i for i in range(r, nrows) if matrix[i][c]), None)
        if pivot is None:
            continue
        matrix[r], matrix[pivot] = matrix[pivot], matrix[r]
        top = matrix[r]
        for i in range(r + 1, nrows):
            row = matrix[i]
            lead = row[c]
            for k in range(c + 1, ncols):
                row[k] = (top[c] * row[k] - lead * top[k]) // previous
            row[c] = zero
        previous = top[c]
        pivots.append(c)
        r += 1
    return matrix[:r], pivots


def bareiss_kernel(rows: list[list], ncols: int, screen: bool = True) -> list[list[int]]:
    """
    Rational kernel basis of the matrix as primitive integer vectors.

    Args:
        rows: rational matrix rows
        ncols: number of unknowns
        screen: try the modular rank pre-screen first

    Returns:
        One vector per free column (empty when the kernel is trivial)
    """
    if screen and rows:
        modular_rank = rank_mod_prime(rows, ncols)
        if modular_rank == ncols:
            logger.debug(f"Modular pre-screen: full column rank {ncols}, kernel trivial")
            return []

    echelon, pivots = bareiss_echelon(integer_rows(rows), ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(reversed(echelon), reversed(pivots)):
            total = sum(row[k] * x[k] for k in range(p + 1, ncols) if row[k] and x[k])
            x[p] = Fraction(-total, row[p])
        basis.append(primitive_vector(x))
    return basis


def polynomial_kernel(rows: list[list], ncols: int, one) -> list[list]:
    """
    Kernel basis over the fraction field of a polynomial ring, polynomial entries only.

    Back-substitution scales the partial solution by each pivot instead of
    dividing by it. Vectors keep their content.
    """
    echelon, pivots = bareiss_echelon(rows, ncols, one=one)
    zero = one - one
    pivot_set = set(pivots)
    basis = []
    for f in (c for c in range(ncols) if c not in pivot_set):
        x = [zero] * ncols
        x[f] = one
        for row, p in zip(reversed(echelon), reversed(pivots)):
            total = zero
            for k in range(p + 1, ncols):
                if row[k] and x[k]:
                    total = total + row[k] * x[k]
            x = [v * row[p] for v in x]
            x[p] = zero - total
        basis.append(x)
    return basis


# ============================================================================
# Gauss-Jordan oracle
# ============================================================================

def gauss_jordan_kernel(rows: list[list], ncols: int, one=Fraction(1)) -> list[list]:
    """
    Kernel basis over any exact field (Fractions, Gaussian rationals, rational functions).

    Plain reduced row echelon form; shares no code with the Bareiss path.
    """
    matrix = [list(row) for row in rows]
    zero = one - one
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(matrix)) if matrix[i][c]), None)
        if pivot is None:
            continue
        matrix[r], matrix[pivot] = matrix[pivot], matrix[r]
        inverse = one / matrix[r][c]
        matrix[r] = [v * inverse for v in matrix[r]]
        for i in range(len(matrix)):
            if i != r and matrix[i][c]:
                factor = matrix[i][c]
                matrix[i] = [a - factor * b for a, b in zip(matrix[i], matrix[r])]
        pivots.append(c)
        r += 1
        if r == len(matrix):
            break

    basis = []
    for f in (c for c in range(ncols) if c not in set(pivots)):
        x = [zero] * ncols
        x[f] = one
        for row_index, p in enumerate(pivots):
            x[p] = zero - matrix[row_index][f]
        basis.append(x)
    return basis


def brute_force_kernel_dimension(rows: list[list], ncols: int) -> int:
    return len(gauss_jordan_kernel([[Fraction(v) for v in row] for row in rows], ncols))
