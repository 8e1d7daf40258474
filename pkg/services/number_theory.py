"""
Number Theory Service for FeketeLab.
Legendre symbols, Fekete coefficient streams, incomplete (shifted) character
sums and smallest quadratic nonresidues.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from services.schemas import CharSumReport

logger = logging.getLogger(__name__)

# Desk-scale primes only
MAX_PRIME = 2**31


# ============================================================================
# Custom Exceptions
# ============================================================================

class NumberTheoryError(Exception):
    """Base number theory error."""
    pass


class InvalidModulusError(NumberTheoryError):
    """Modulus is not an odd prime in the supported range."""
    pass


# ============================================================================
# Moduli and symbols
# ============================================================================

def is_prime(n: int) -> bool:
    """Deterministic trial division (n < 2^31 in practice)."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


@dataclass(frozen=True)
class PrimeModulus:
    """Odd prime p with 3 <= p < 2^31."""
    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 3 or self.p >= MAX_PRIME:
            raise InvalidModulusError(f"modulus must be an odd prime in [3, 2^31): got {self.p}")
        if not is_prime(self.p):
            raise InvalidModulusError(f"modulus {self.p} is not an odd prime")

    def __int__(self):
        return self.p


def as_modulus(p) -> PrimeModulus:
    return p if isinstance(p, PrimeModulus) else PrimeModulus(int(p))


def jacobi_symbol(a: int, n: int) -> int:
    """Jacobi symbol (a|n) for odd positive n by quadratic reciprocity."""
    if n <= 0 or n % 2 == 0:
        raise NumberTheoryError(f"Jacobi symbol needs an odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def euler_criterion(n: int, p: int) -> int:
    """Oracle: n^((p-1)/2) mod p mapped to {-1, 0, 1}."""
    value = pow(n % p, (p - 1) // 2, p)
    return -1 if value == p - 1 else value


def legendre_symbol(n: int, p) -> int:
    """
    Legendre symbol (n|p).

    Raises:
        InvalidModulusError: if p is not an odd prime
    """
    modulus = as_modulus(p)
    return jacobi_symbol(n, modulus.p)


@lru_cache(maxsize=256)
def period_table(p: int) -> tuple[int, ...]:
    """(n|p) for n = 0..p-1."""
    modulus = as_modulus(p)
    return tuple(jacobi_symbol(n, modulus.p) for n in range(modulus.p))


class FeketeSeries:
    """
    Legendre sequence n -> (n|p), extended periodically with period p.

    The Fekete polynomial itself stops at degree p-1; index p maps back to 0.
    """

    def __init__(self, p):
        self.modulus = as_modulus(p)
        self.table = period_table(self.modulus.p)

    @property
    def p(self) -> int:
        return self.modulus.p

    def __call__(self, n: int) -> int:
        return self.table[n % self.modulus.p]

    def coefficients(self, count: int) -> list[int]:
        if count < 1:
            raise NumberTheoryError(f"count must be positive, got {count}")
        p = self.modulus.p
        return [self.table[n % p] for n in range(count)]

    def __repr__(self):
        return f"FeketeSeries(p={self.modulus.p})"


def fekete_coefficients(p, count: int) -> list[int]:
    """First `count` Fekete coefficients (n|p), n = 0..count-1."""
    return FeketeSeries(p).coefficients(count)


def smallest_nonresidue(p) -> int:
    """Least n >= 1 with (n|p) = -1."""
    table = period_table(as_modulus(p).p)
    return next(n for n in range(1, len(table)) if table[n] == -1)


# ============================================================================
# Character sums
# ============================================================================

def _validate_pair(p: int, j: int, h: int) -> None:
    if not 0 <= j < h < p:
        raise NumberTheoryError(f"shift pair must satisfy 0 <= j < h < p: got ({j}, {h}) for p={p}")


def incomplete_sum(p, start: int, length: int) -> int:
    """Plain sum of (n|p) for n = start+1 .. start+length."""
    if length < 1:
        raise NumberTheoryError("length must be positive")
    f = FeketeSeries(p)
    return sum(f(start + k) for k in range(1, length + 1))


def incomplete_pair_sum(p, j: int, h: int, start: int, length: int) -> int:
    """
    Sum of f(start+k+j) f(start+k+h) for k = 1..length, f the Legendre sequence.

    Raises:
        NumberTheoryError: if not 0 <= j < h < p or length < 1
    """
    f = FeketeSeries(p)
    _validate_pair(f.p, j, h)
    if length < 1:
        raise NumberTheoryError("length must be positive")
    return sum(f(start + k + j) * f(start + k + h) for k in range(1, length + 1))


def complete_pair_sum(p, j: int, h: int) -> int:
    """Full-period shifted sum; equals -1 for every j < h."""
    return incomplete_pair_sum(p, j, h, 0, as_modulus(p).p)


def _summand_prefix(f: FeketeSeries, shifts: Optional[tuple[int, int]], size: int) -> list[int]:
    prefix = [0] * (size + 1)
    running = 0
    if shifts is None:
        for k in range(1, size + 1):
            running += f(k)
            prefix[k] = running
    else:
        j, h = shifts
        for k in range(1, size + 1):
            running += f(k + j) * f(k + h)
            prefix[k] = running
    return prefix


def max_incomplete_sum(p, max_length: int, shifts: Optional[tuple[int, int]] = None) -> CharSumReport:
    """
    Exhaustive scan of all starts in [0, p) and lengths in [1, max_length].

    Uses prefix sums with sliding-window maximum/minimum deques, so the scan
    is O(p) per prime. Ties break by smallest (start, length).

    Args:
        p: odd prime
        max_length: longest interval, at most p
        shifts: optional (j, h) pair; plain sums when None

    Returns:
        CharSumReport of the interval maximizing |value|
    """
    f = FeketeSeries(p)
    p = f.p
    if not 1 <= max_length <= p:
        raise NumberTheoryError(f"max_length must lie in [1, p]: got {max_length} for p={p}")
    if shifts is not None:
        _validate_pair(p, *shifts)

    prefix = _summand_prefix(f, shifts, p + max_length)
    highs: deque[int] = deque()
    lows: deque[int] = deque()
    best_value, best_start, best_length = 0, 0, 1
    best_abs = -1

    # Window of prefix indices for start s is [s+1, s+max_length].
    for idx in range(1, max_length + 1):
        while highs and prefix[highs[-1]] < prefix[idx]:
            highs.pop()
        highs.append(idx)
        while lows and prefix[lows[-1]] > prefix[idx]:
            lows.pop()
        lows.append(idx)

    for start in range(p):
        if start:
            idx = start + max_length
            while highs and prefix[highs[-1]] < prefix[idx]:
                highs.pop()
            highs.append(idx)
            while lows and prefix[lows[-1]] > prefix[idx]:
                lows.pop()
            lows.append(idx)
            while highs[0] <= start:
                highs.popleft()
            while lows[0] <= start:
                lows.popleft()

        base = prefix[start]
        candidates = [
            (prefix[highs[0]] - base, highs[0] - start),
            (prefix[lows[0]] - base, lows[0] - start),
        ]
        for value, length in candidates:
            if abs(value) > best_abs or (
                abs(value) == best_abs and start == best_start and length < best_length
            ):
                best_abs, best_value, best_start, best_length = abs(value), value, start, length

    normalized = best_abs / (math.sqrt(p) * math.log(p))
    logger.debug(f"max_incomplete_sum p={p} shifts={shifts}: {best_value} at ({best_start}, {best_length})")
    return CharSumReport(
        p=p,
        shift_pair=shifts,
        interval=(best_start, best_length),
        value=best_value,
        normalized=normalized,
    )


def pair_correlation_tau(p, m: int, max_length: Optional[int] = None) -> int:
    """
    Largest |shifted sum| over all pairs 1 <= j < h <= m and all windows of length <= max_length.

    Args:
        p: odd prime with m < p
        m: number of shifts
        max_length: longest window (default p)
    """
    p = as_modulus(p).p
    if m >= p:
        raise NumberTheoryError(f"need m < p for shifted sums: m={m}, p={p}")
    tau = 0
    for j in range(1, m + 1):
        for h in range(j + 1, m + 1):
            report = max_incomplete_sum(p, max_length or p, (j, h))
            tau = max(tau, abs(report.value))
    logger.info(f"Pair correlation tau for p={p}, m={m}: {tau}")
    # No pairs when m = 1; floor at 1 so the bound stays positive.
    return max(tau, 1)


def squared_mass(f, a: int, b: int) -> int:
    """Sum of |f(n)|^2 for n = a..b."""
    return sum(abs(f(n)) ** 2 for n in range(a, b + 1))
