"""
Root Certification Service for FeketeLab.
Certified complex root enclosures (mpmath approximations checked exactly in
Q(i) with Weierstrass inclusion discs) and Sturm real-root counting.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath
from django.conf import settings
from mpmath.libmp.libhyper import NoConvergence

from services.enclosures import sqrt_bounds
from services.exact_poly import (
    ExactPolyError,
    GaussianRational,
    Scalar,
    UniPoly,
    make_scalar,
    scalar_norm,
)

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = Fraction(1, 10**6)
DEFAULT_REFINEMENT_BUDGET = 8
MAX_REFINEMENT_BUDGET = 64
BASE_DPS = 30


def resolve_precision(tolerance=None, refinement_budget: Optional[int] = None) -> tuple[Fraction, int]:
    """Fill unset values from FEKETELAB_ROOT_TOLERANCE / FEKETELAB_REFINEMENT_BUDGET."""
    if tolerance is None:
        tolerance = getattr(settings, "FEKETELAB_ROOT_TOLERANCE", DEFAULT_TOLERANCE) \
            if settings.configured else DEFAULT_TOLERANCE
    if refinement_budget is None:
        refinement_budget = getattr(settings, "FEKETELAB_REFINEMENT_BUDGET", DEFAULT_REFINEMENT_BUDGET) \
            if settings.configured else DEFAULT_REFINEMENT_BUDGET
    return Fraction(tolerance), min(refinement_budget, MAX_REFINEMENT_BUDGET)


class RootCertificationError(ExactPolyError):
    """Root enclosures could not be certified within the refinement budget."""
    pass


@dataclass(frozen=True)
class RootEnclosure:
    """Disc (center, radius) holding exactly `multiplicity` roots, counted with multiplicity."""
    center: Scalar
    radius: Fraction
    multiplicity: int

    @property
    def center_complex(self) -> complex:
        return complex(float(self.center.real), float(self.center.imag))

    @property
    def meets_real_axis(self) -> bool:
        return abs(Fraction(self.center.imag)) <= self.radius

    def real_interval(self) -> Optional[tuple[Fraction, Fraction]]:
        """Outer bounds of disc ∩ R, or None when the disc misses the axis."""
        if not self.meets_real_axis:
            return None
        x = Fraction(self.center.real)
        return (x - self.radius, x + self.radius)


# ============================================================================
# mpmath approximation
# ============================================================================

def _mpf_to_fraction(value) -> Fraction:
    sign, mantissa, exponent, _ = value._mpf_
    if not mantissa:
        return Fraction(0)
    number = Fraction(mantissa) * (Fraction(2) ** exponent)
    return -number if sign else number


def _to_mp(value):
    real, imag = Fraction(value.real), Fraction(value.imag)
    return mpmath.mpc(mpmath.mpf(real.numerator) / real.denominator,
                      mpmath.mpf(imag.numerator) / imag.denominator)


def approximate_roots(poly: UniPoly, dps: int) -> Optional[list[Scalar]]:
    """Numerical roots from mpmath.polyroots converted exactly to Q(i); None if no convergence."""
    coeffs = [_to_mp(c) for c in reversed(poly.coeffs)]
    with mpmath.workdps(dps):
        try:
            roots = mpmath.polyroots(coeffs, maxsteps=100 + 50 * poly.degree, extraprec=2 * dps)
        except NoConvergence:
            logger.debug(f"polyroots did not converge at dps={dps}")
            return None
        values = []
        for root in roots:
            root = mpmath.mpc(root)
            values.append(make_scalar(_mpf_to_fraction(root.real), _mpf_to_fraction(root.imag)))
    return values


# ============================================================================
# Inclusion certification
# ============================================================================

def squarefree_decomposition(poly: UniPoly) -> list[tuple[UniPoly, int]]:
    """Yun's algorithm: poly = lc * prod(factor^k) with squarefree, coprime factors."""
    result = []
    if poly.degree < 1:
        return result
    derivative = poly.derivative()
    common = poly.gcd(derivative)
    b = poly // common
    c = derivative // common
    d = c - b.derivative()
    k = 1
    while b.degree >= 1:
        a = b.gcd(d)
        if a.degree >= 1:
            result.append((a, k))
        b = b // a
        c = d // a
        d = c - b.derivative()
        k += 1
    return result


def _separate_duplicates(points: list[Scalar], delta: Fraction) -> list[Scalar]:
    seen: dict[Scalar, int] = {}
    result = []
    for z in points:
        k = seen.get(z, 0)
        seen[z] = k + 1
        result.append(z + GaussianRational(delta * k, delta * k) if k else z)
    return result


def _covering_disc(discs: list[tuple[Scalar, Fraction, int]]) -> tuple[Scalar, Fraction, int]:
    center = sum((c for c, _, _ in discs), Fraction(0)) / len(discs)
    radius = max(sqrt_bounds(scalar_norm(center - c)).upper + r for c, r, _ in discs)
    return center, radius, sum(k for _, _, k in discs)


def _merge_until_disjoint(discs: list[tuple[Scalar, Fraction, int]]) -> list[tuple[Scalar, Fraction, int]]:
    clusters = [[disc] for disc in discs]
    while True:
        covers = [_covering_disc(cluster) for cluster in clusters]
        pair = next(
            ((a, b) for a in range(len(covers)) for b in range(a + 1, len(covers))
             if scalar_norm(covers[a][0] - covers[b][0]) <= (covers[a][1] + covers[b][1]) ** 2),
            None,
        )
        if pair is None:
            return covers
        a, b = pair
        clusters[a] = clusters[a] + clusters[b]
        del clusters[b]


def _inclusion_discs(poly: UniPoly, points: list[Scalar]) -> list[tuple[Scalar, Fraction, int]]:
    """Weierstrass discs of radius n|W_i|, grouped into disjoint counted discs."""
    n = poly.degree
    lead = poly.leading_coefficient
    discs = []
    for i, z in enumerate(points):
        denominator = lead
        for j, w in enumerate(points):
            if i != j:
                denominator = denominator * (z - w)
        correction = poly(z) / denominator
        discs.append((z, n * sqrt_bounds(scalar_norm(correction)).upper, 1))
    return _merge_until_disjoint(discs)


def root_enclosures(
    poly: UniPoly,
    tolerance=None,
    refinement_budget: Optional[int] = None,
) -> list[RootEnclosure]:
    """
    Certified discs around the complex roots of a nonzero polynomial.

    Args:
        poly: nonzero polynomial over Q(i)
        tolerance: maximum disc radius (default FEKETELAB_ROOT_TOLERANCE)
        refinement_budget: precision doublings to attempt, capped at 64
            (default FEKETELAB_REFINEMENT_BUDGET)

    Returns:
        Pairwise disjoint RootEnclosure discs whose multiplicities sum to deg poly

    Raises:
        RootCertificationError: if no certificate is found within the budget
    """
    if poly.is_zero:
        raise ExactPolyError("root_enclosures requires a nonzero polynomial")
    if poly.degree == 0:
        return []
    tolerance, budget = resolve_precision(tolerance, refinement_budget)
    factors = squarefree_decomposition(poly)

    for attempt in range(budget + 1):
        dps = BASE_DPS * (2 ** attempt)
        discs = []
        for factor, multiplicity in factors:
            points = approximate_roots(factor, dps)
            if points is None:
                discs = None
                break
            points = _separate_duplicates(points, Fraction(1, 10 ** (dps // 2)))
            discs.extend((c, r, k * multiplicity) for c, r, k in _inclusion_discs(factor, points))
        if discs is not None:
            discs = _merge_until_disjoint(discs)
            if all(radius <= tolerance for _, radius, _ in discs):
                enclosures = sorted(
                    (RootEnclosure(center=c, radius=r, multiplicity=k) for c, r, k in discs),
                    key=lambda e: (Fraction(e.center.real), Fraction(e.center.imag)),
                )
                logger.debug(f"Certified {len(enclosures)} enclosures for degree {poly.degree} at dps={dps}")
                return enclosures
        logger.debug(f"Root certification attempt {attempt} failed at dps={dps}; refining")

    logger.error(f"Root certification failed for {poly} after {budget} refinements")
    raise RootCertificationError(
        f"could not certify roots of degree-{poly.degree} polynomial to radius {tolerance}"
    )


# ============================================================================
# Sturm sequences
# ============================================================================

def squarefree_part(poly: UniPoly) -> UniPoly:
    if poly.degree < 1:
        return poly
    return poly // poly.gcd(poly.derivative())


def sturm_sequence(poly: UniPoly) -> list[UniPoly]:
    """Sturm chain of a real polynomial (made squarefree first)."""
    if not poly.is_real:
        raise ExactPolyError("Sturm sequences need real coefficients")
    base = squarefree_part(poly)
    chain = [base, base.derivative()]
    while not chain[-1].is_zero:
        chain.append(-(chain[-2] % chain[-1]))
    return chain[:-1]


def _sign_changes(values: list) -> int:
    signs = [1 if v > 0 else -1 for v in values if v]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_real_roots(poly: UniPoly, lower, upper) -> int:
    """Number of distinct real roots in the closed interval [lower, upper]."""
    if poly.is_zero:
        raise ExactPolyError("zero polynomial has infinitely many roots")
    lower, upper = Fraction(lower), Fraction(upper)
    if lower > upper or poly.degree < 1:
        return 0
    chain = sturm_sequence(poly)
    count = _sign_changes([p(lower) for p in chain]) - _sign_changes([p(upper) for p in chain])
    if not chain[0](lower):
        count += 1
    return count
