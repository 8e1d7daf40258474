"""
Oscillation Bounds Service for FeketeLab.
Critical sets C(Q), the recursive R_i interval construction, exact checks of
the summation-by-parts lemmas and the Delta(n) nonvanishing search.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Callable, Optional

from services.enclosures import (
    E2_ENCLOSURE,
    RationalInterval,
    abs_bounds,
    certified_ceil,
    e_power,
)
from services.exact_poly import Scalar, UniPoly, scalar_norm, to_scalar
from services.roots import (
    RootEnclosure,
    count_real_roots,
    resolve_precision,
    root_enclosures,
)
from services.schemas import (
    ConditionCertificate,
    CriticalSetModel,
    DeltaWitness,
    ExactInterval,
    HypothesisStatus,
    IntervalPlan,
    LemmaReport,
    Verdict,
    rational_to_pair,
    scalar_to_json,
)

logger = logging.getLogger(__name__)

Sequence = Callable[[int], object]

# Tolerance shrink factor between enclosure refinement rounds
REFINEMENT_FACTOR = Fraction(1, 10**6)
PLAN_REFINEMENT_ROUNDS = 3
STATUS_ORDER = [HypothesisStatus.FAILED, HypothesisStatus.INCONCLUSIVE, HypothesisStatus.VERIFIED]
DELTA_CONSTANT = 168
SIZE_CONSTANT = 20

A_DISCREPANCY_NOTE = (
    "intervals use a = D^2 L R_i, b = a + R_i; the closing step of the existence "
    "argument also writes a = 2 D^2 m R_i, which conditions (ii)-(iii) do not support"
)


# ============================================================================
# Custom Exceptions
# ============================================================================

class OscillationError(Exception):
    """Base oscillation error."""
    pass


class IntervalPlanError(OscillationError):
    """No index of the R_i sequence could be certified."""
    def __init__(self, message: str, failing_condition: str):
        super().__init__(message)
        self.failing_condition = failing_condition


class PreconditionError(OscillationError):
    """Inputs violate the stated preconditions."""
    pass


class BoundViolationError(OscillationError):
    """The search exhausted the stated bound without a witness."""
    def __init__(self, message: str, report: dict):
        super().__init__(message)
        self.report = report


# ============================================================================
# Critical sets
# ============================================================================

def critical_polynomials(poly: UniPoly) -> list[UniPoly]:
    """Real polynomials whose zeros make up C(Q), by the four-case split of Q = A + iB."""
    real, imag = poly.real_imag_split()
    polys = []
    if not real.is_constant:
        polys.append(real.derivative())
    if not imag.is_constant:
        polys.append(imag.derivative())
    return [p for p in polys if not p.is_constant]


@dataclass
class CriticalSet:
    """C(Q) as certified enclosures; real_intervals cover every real member."""
    source: UniPoly
    enclosures: list[RootEnclosure] = field(default_factory=list)

    @property
    def real_intervals(self) -> list[tuple[Fraction, Fraction]]:
        return [e.real_interval() for e in self.enclosures if e.meets_real_axis]

    def meets(self, lower, upper) -> bool:
        """True unless every real enclosure is certainly outside [lower, upper]."""
        return any(not (hi < lower or lo > upper) for lo, hi in self.real_intervals)

    def to_model(self) -> CriticalSetModel:
        return CriticalSetModel(
            real_points=[(scalar_to_json(e.center), rational_to_pair(e.radius))
                         for e in self.enclosures if e.meets_real_axis],
            complex_points=[(scalar_to_json(e.center), rational_to_pair(e.radius), e.multiplicity)
                            for e in self.enclosures],
        )


def critical_set(
    poly: UniPoly,
    tolerance=None,
    refinement_budget: Optional[int] = None,
) -> CriticalSet:
    target = UniPoly.one()
    polys = critical_polynomials(poly)
    if not polys:
        return CriticalSet(source=poly)
    for p in polys:
        target = target * p
    return CriticalSet(source=poly, enclosures=root_enclosures(target, tolerance, refinement_budget))


# ============================================================================
# Shared certification helpers
# ============================================================================

def _segment_distance_squared(center: Scalar, lower: Fraction, upper: Fraction) -> Fraction:
    x = Fraction(center.real)
    dx = max(lower - x, Fraction(0), x - upper)
    return dx * dx + Fraction(center.imag) ** 2


def _root_distance_status(
    enclosures: list[RootEnclosure], a: int, b: int, threshold: Fraction
) -> HypothesisStatus:
    """|j - lambda| >= threshold for integers j in [a, b] and all enclosed roots."""
    status = HypothesisStatus.VERIFIED
    for e in enclosures:
        if _segment_distance_squared(e.center, Fraction(a), Fraction(b)) >= (threshold + e.radius) ** 2:
            continue
        nearest = min(max(round(Fraction(e.center.real)), a), b)
        distance_sq = scalar_norm(e.center - nearest)
        if distance_sq >= (threshold + e.radius) ** 2:
            continue
        if threshold > e.radius and distance_sq < (threshold - e.radius) ** 2:
            return HypothesisStatus.FAILED
        status = HypothesisStatus.INCONCLUSIVE
    return status


def _refined_root_distance(polys: list[UniPoly], a: int, b: int, threshold: Fraction,
                           tolerance=None) -> HypothesisStatus:
    """Worst root-distance status over the nonzero polys, refining enclosures while inconclusive."""
    tolerance, refinement_budget = resolve_precision(tolerance, None)
    status = HypothesisStatus.VERIFIED
    for _ in range(PLAN_REFINEMENT_ROUNDS):
        statuses = [
            _root_distance_status(root_enclosures(q, tolerance, refinement_budget), a, b, threshold)
            for q in polys if not q.is_zero
        ]
        status = min(statuses, key=STATUS_ORDER.index, default=HypothesisStatus.VERIFIED)
        if status != HypothesisStatus.INCONCLUSIVE:
            return status
        logger.debug(f"Root distance inconclusive on [{a}, {b}] at tolerance {tolerance}; refining")
        tolerance *= REFINEMENT_FACTOR
    return status


def _critical_status(polys: list[UniPoly], a: int, b: int) -> HypothesisStatus:
    """Exact Sturm count of C-set members inside [a, b]."""
    for p in polys:
        if count_real_roots(p, a, b):
            return HypothesisStatus.FAILED
    return HypothesisStatus.VERIFIED


def _degree_bound(polys: list[UniPoly]) -> int:
    return max(1, max((q.degree for q in polys), default=0))


def _combine(statuses) -> Verdict:
    statuses = list(statuses)
    if HypothesisStatus.FAILED in statuses:
        return Verdict.HYPOTHESIS_FAILED
    if HypothesisStatus.INCONCLUSIVE in statuses:
        return Verdict.INCONCLUSIVE
    return Verdict.HOLDS


# ============================================================================
# Interval construction
# ============================================================================

def r_sequence(A, D: int, m: int, t: Optional[int] = None) -> list[int]:
    """R_1 = ceil(A(m-1)e^2 + 1), R_i = ceil(R_{i-1}(D^2 L + D + 1)/(D^2 L - D)), L = 9m^2."""
    A = Fraction(A)
    L = 9 * m * m
    t = t if t is not None else D * m + 2 * D * m * m
    if m == 1:
        first = 1
    else:
        first = certified_ceil(lambda digits: A * (m - 1) * e_power(2, digits) + 1)
    numerator, denominator = D * D * L + D + 1, D * D * L - D
    sequence = [first]
    while len(sequence) < t:
        sequence.append(-(-sequence[-1] * numerator // denominator))
    return sequence


def size_bound(A, D: int, m: int) -> RationalInterval:
    """Enclosure of 20 A e^3 D^2 m^3 (A + D m)."""
    A = Fraction(A)
    return SIZE_CONSTANT * A * e_power(3) * (D * D * m ** 3) * (A + D * m)


def padded_contacts(sequence: list[int], D: int, L: int) -> tuple[list[int], list[tuple[int, int]]]:
    """
    Compare consecutive padded intervals [D^2 L R - D R, D^2 L R + D R + R].

    Returns:
        (1-based indices i whose padded interval overlaps interval i+1,
         (i, point) pairs where the two share only an endpoint)
    """
    padded = [(D * D * L * R - D * R, D * D * L * R + D * R + R) for R in sequence]
    overlaps, touching = [], []
    for index, ((_, hi), (lo_next, _)) in enumerate(zip(padded, padded[1:]), start=1):
        if hi > lo_next:
            overlaps.append(index)
        elif hi == lo_next:
            touching.append((index, hi))
    return overlaps, touching


def interval_plan(
    Qs: list[UniPoly],
    A,
    D: int,
    m: int,
    tolerance=None,
    refinement_budget: Optional[int] = None,
) -> IntervalPlan:
    """
    Certified [a, b] = [D^2 L R_i, D^2 L R_i + R_i] avoiding root zones and critical sets.

    Args:
        Qs: m polynomials of degree <= D
        A: real parameter >= 1
        D: degree bound
        m: number of polynomials

    Raises:
        PreconditionError: malformed inputs
        IntervalPlanError: no index certified after the refinement rounds
    """
    A = Fraction(A)
    if len(Qs) != m or m < 1 or D < 1:
        raise PreconditionError(f"need m = {m} >= 1 polynomials and D >= 1")
    if A < 1:
        raise PreconditionError(f"A must be at least 1, got {A}")
    if any(q.degree > D for q in Qs):
        raise PreconditionError(f"every Q must have degree <= D = {D}")

    L = 9 * m * m
    sequence = r_sequence(A, D, m)
    overlaps, touching = padded_contacts(sequence, D, L)
    if overlaps:
        logger.error(f"Padded R_i intervals overlap at i = {overlaps} for A={A}, D={D}, m={m}")
    contact_notes = [f"padded intervals {i} and {i + 1} share the endpoint {point}; "
                     f"closed-interval disjointness fails there" for i, point in touching]
    if touching:
        logger.warning(f"Padded R_i intervals touch for A={A}, D={D}, m={m}: {touching}")
    e2_upper = e_power(2).upper
    bound = size_bound(A, D, m)

    tolerance, refinement_budget = resolve_precision(tolerance, refinement_budget)
    failures: dict[str, int] = {}
    for round_index in range(PLAN_REFINEMENT_ROUNDS):
        root_sets = [root_enclosures(q, tolerance, refinement_budget) for q in Qs if not q.is_zero]
        critical_sets = [critical_set(Qs[i] * Qs[j], tolerance, refinement_budget)
                         for i in range(m) for j in range(i + 1, m)]
        for index, R in enumerate(sequence, start=1):
            a = D * D * L * R
            b = a + R
            checks = {
                "i": R > A * (m - 1) * e2_upper,
                "ii": all(_root_distance_status(enc, a, b, Fraction(D * R)) == HypothesisStatus.VERIFIED
                          for enc in root_sets),
                "iii": Fraction(b - a, a) <= Fraction(1, D * D * L),
                "iv": not any(cs.meets(a, b) for cs in critical_sets),
            }
            if not all(checks.values()):
                for name, ok in checks.items():
                    if not ok:
                        failures[name] = failures.get(name, 0) + 1
                continue

            conditions = [
                ConditionCertificate(name="i", status=HypothesisStatus.VERIFIED,
                                     detail=f"b - a = {R} > A(m-1)e^2"),
                ConditionCertificate(name="ii", status=HypothesisStatus.VERIFIED,
                                     detail=f"root distance >= a/(LD) = {D * R}"),
                ConditionCertificate(name="iii", status=HypothesisStatus.VERIFIED,
                                     detail=f"(b - a)/a = 1/{D * D * L}"),
                ConditionCertificate(name="iv", status=HypothesisStatus.VERIFIED,
                                     detail=f"{len(critical_sets)} critical sets avoid [a, b]"),
                ConditionCertificate(
                    name="size",
                    status=HypothesisStatus.VERIFIED if bound.certainly_above(b) else HypothesisStatus.FAILED,
                    detail="b < 20 A e^3 D^2 m^3 (A + D m)",
                ),
            ]
            plan = IntervalPlan(
                a=a, b=b, L=L, A=rational_to_pair(A), D=D, m=m,
                R_sequence=sequence, chosen_index=index, conditions=conditions,
                size_bound=ExactInterval.from_bounds(bound.lower, bound.upper),
                padded_intervals_disjoint=not overlaps,
                padded_contacts=[point for _, point in touching],
                notes=[A_DISCREPANCY_NOTE] + contact_notes,
            )
            logger.info(f"Interval plan certified: a={a}, b={b}, i={index} (A={A}, D={D}, m={m})")
            return plan
        logger.debug(f"Plan round {round_index} failed ({failures}); refining enclosures")
        tolerance *= REFINEMENT_FACTOR

    failing = max(failures, key=failures.get) if failures else "ii"
    logger.error(f"interval_plan failed: condition counts {failures}")
    raise IntervalPlanError(f"no index certified; most frequent failure: condition ({failing})",
                            failing_condition=failing)


# ============================================================================
# Independent recertification
# ============================================================================

def _modulus_upper(value) -> Fraction:
    norm = scalar_norm(value)
    scale = 1 << 64
    radicand = norm.numerator * norm.denominator * scale * scale
    return Fraction(isqrt(radicand) + 1, norm.denominator * scale)


def _modulus_lower(value) -> Fraction:
    norm = scalar_norm(value)
    scale = 1 << 64
    radicand = norm.numerator * norm.denominator * scale * scale
    return Fraction(isqrt(radicand), norm.denominator * scale)


def _no_root_in_disc(poly: UniPoly, center: int, radius: Fraction) -> bool:
    """Rouche: |c_0| > sum |c_k| r^k for Q(center + z) = sum c_k z^k."""
    shifted = poly.shift(center)
    tail = sum((_modulus_upper(c) * radius ** k for k, c in enumerate(shifted.coeffs) if k and c),
               Fraction(0))
    return _modulus_lower(shifted[0]) > tail


def recertify_interval_plan(plan: IntervalPlan, Qs: list[UniPoly]) -> LemmaReport:
    """Check conditions (i)-(iv) again with Rouche disc tests and Sturm counts."""
    A = Fraction(*plan.A)
    a, b, L, D, m = plan.a, plan.b, plan.L, plan.D, plan.m
    hypotheses = {}

    hypotheses["i"] = (HypothesisStatus.VERIFIED if (b - a) > A * (m - 1) * E2_ENCLOSURE[1]
                       else HypothesisStatus.FAILED)
    threshold = Fraction(a, L * D)
    ok = all(_no_root_in_disc(q, j, threshold) for q in Qs if not q.is_zero for j in range(a, b + 1))
    hypotheses["ii"] = HypothesisStatus.VERIFIED if ok else HypothesisStatus.FAILED
    hypotheses["iii"] = (HypothesisStatus.VERIFIED if Fraction(b - a, a) <= Fraction(1, D * D * L)
                         else HypothesisStatus.FAILED)
    pairs = [critical_polynomials(Qs[i] * Qs[j]) for i in range(m) for j in range(i + 1, m)]
    hypotheses["iv"] = (HypothesisStatus.FAILED
                        if any(_critical_status(polys, a, b) == HypothesisStatus.FAILED for polys in pairs)
                        else HypothesisStatus.VERIFIED)
    verdict = Verdict.HOLDS if all(s == HypothesisStatus.VERIFIED for s in hypotheses.values()) \
        else Verdict.VIOLATED
    overlaps, touching = padded_contacts(plan.R_sequence, D, L)
    notes = [f"padded intervals {i} and {i + 1} overlap" for i in overlaps]
    notes += [f"padded intervals {i} and {i + 1} share the endpoint {point}" for i, point in touching]
    return LemmaReport(lemma="interval_plan_recertification", hypotheses=hypotheses, verdict=verdict,
                       notes=notes)


# ============================================================================
# Delta search
# ============================================================================

def delta_value(Qs: list[UniPoly], f: Sequence, n: int) -> Scalar:
    """Delta(n) = sum_{j=1}^m Q_j(n) f(n + j), exact."""
    total = Fraction(0)
    for j, q in enumerate(Qs, start=1):
        if not q.is_zero:
            total = total + q(n) * to_scalar(f(n + j))
    return to_scalar(total)


def delta_bound(tau, kappa, D: int, m: int) -> RationalInterval:
    """Enclosure of 168 tau kappa^-1 e^3 D^3 m^4."""
    return DELTA_CONSTANT * Fraction(tau) / Fraction(kappa) * e_power(3) * (D ** 3 * m ** 4)


def delta_search(f: Sequence, Qs: list[UniPoly], kappa, tau) -> DeltaWitness:
    """
    First n with Delta(n) != 0, certified below 168 tau/kappa e^3 D^3 m^4.

    Raises:
        PreconditionError: all Q zero, nonpositive kappa/tau, or 4 tau < kappa
        BoundViolationError: the scan reached the bound with Delta identically zero
    """
    kappa, tau = Fraction(kappa), Fraction(tau)
    if not Qs or all(q.is_zero for q in Qs):
        raise PreconditionError("at least one Q_j must be nonzero")
    if kappa <= 0 or tau <= 0:
        raise PreconditionError("kappa and tau must be positive")
    if 4 * tau < kappa:
        raise PreconditionError(f"need 4 tau >= kappa: tau={tau}, kappa={kappa}")

    m = len(Qs)
    D = _degree_bound(Qs)
    bound = delta_bound(tau, kappa, D, m)
    limit = math.ceil(bound.upper)
    for n in range(limit):
        value = delta_value(Qs, f, n)
        if not value:
            continue
        if not bound.certainly_above(n):
            break
        return DeltaWitness(
            n=n, delta_value=scalar_to_json(value),
            bound=ExactInterval.from_bounds(bound.lower, bound.upper),
            m=m, D=D, kappa=rational_to_pair(kappa), tau=rational_to_pair(tau),
        )

    report = {
        "m": m, "D": D, "kappa": rational_to_pair(kappa), "tau": rational_to_pair(tau),
        "bound": [rational_to_pair(bound.lower), rational_to_pair(bound.upper)],
        "scanned": limit,
        "explanation": "hypothesis (i) or (ii) is violated, or the stated bound fails",
    }
    logger.error(f"delta_search found no witness below {float(bound)}: {report}")
    raise BoundViolationError("Delta(n) vanished on the whole range below the bound", report)


# ============================================================================
# Lemma checks
# ============================================================================

def lemma31_check(Q: UniPoly, f: Sequence, a: int, b: int, L: int, kappa,
                  tolerance=None) -> LemmaReport:
    """Lower bound of sum |Q(j)|^2 |f(j)|^2 by (b - a) kappa e^-2 max |Q(j)|^2."""
    kappa = Fraction(kappa)
    D = _degree_bound([Q])
    hypotheses = {}
    if Q.is_zero:
        hypotheses["Q_nonzero"] = HypothesisStatus.FAILED
    else:
        hypotheses["i"] = _refined_root_distance([Q], a, b, Fraction(a, L * D), tolerance)
    hypotheses["ii"] = (HypothesisStatus.VERIFIED if Fraction(b - a, a) <= Fraction(1, L * D * D)
                        else HypothesisStatus.FAILED)
    mass = sum(scalar_norm(to_scalar(f(j))) for j in range(a, b + 1))
    hypotheses["iii"] = HypothesisStatus.VERIFIED if mass >= kappa * (b - a) else HypothesisStatus.FAILED

    values = [scalar_norm(Q(j)) for j in range(a, b + 1)]
    lhs = sum(v * scalar_norm(to_scalar(f(j))) for v, j in zip(values, range(a, b + 1)))
    peak = max(values)
    e2 = e_power(2)
    rhs = RationalInterval((b - a) * kappa * peak / e2.upper, (b - a) * kappa * peak / e2.lower)

    verdict = _combine(hypotheses.values())
    if verdict == Verdict.HOLDS:
        if lhs >= rhs.upper:
            verdict = Verdict.HOLDS
        elif lhs < rhs.lower:
            verdict = Verdict.VIOLATED
        else:
            verdict = Verdict.INCONCLUSIVE
    return LemmaReport(
        lemma="lemma31", hypotheses=hypotheses,
        lhs=ExactInterval.from_bounds(lhs), rhs=ExactInterval.from_bounds(rhs.lower, rhs.upper),
        verdict=verdict,
    )


def lemma32_check(Q: UniPoly, f: Sequence, n: int, a: int, b: int, tau,
                  tolerance=None) -> LemmaReport:
    """|sum_{j=a}^b Q(j) f(n+j)| <= 4 tau (|Q(b)| + |Q(a)|) when [a, b] misses C(Q)."""
    tau = Fraction(tau)
    hypotheses = {}
    if critical_set(Q, tolerance).meets(a, b):
        hypotheses["critical_set"] = _critical_status(critical_polynomials(Q), a, b)
    else:
        hypotheses["critical_set"] = HypothesisStatus.VERIFIED

    partial = Fraction(0)
    bounded = True
    for r in range(a, b + 1):
        partial = partial + to_scalar(f(n + r))
        if scalar_norm(partial) > tau * tau:
            bounded = False
            break
    hypotheses["partial_sums"] = HypothesisStatus.VERIFIED if bounded else HypothesisStatus.FAILED

    total = sum((Q(j) * to_scalar(f(n + j)) for j in range(a, b + 1)), Fraction(0))
    qa, qb = scalar_norm(Q(a)), scalar_norm(Q(b))
    excess = scalar_norm(total) / (16 * tau * tau) - qa - qb
    holds = excess <= 0 or excess * excess <= 4 * qa * qb
    rhs = 4 * tau * (abs_bounds(Q(a)) + abs_bounds(Q(b)))
    lhs = abs_bounds(total)

    verdict = _combine(hypotheses.values())
    if verdict == Verdict.HOLDS and not holds:
        verdict = Verdict.VIOLATED
    return LemmaReport(
        lemma="lemma32", hypotheses=hypotheses,
        lhs=ExactInterval.from_bounds(lhs.lower, lhs.upper),
        rhs=ExactInterval.from_bounds(rhs.lower, rhs.upper),
        verdict=verdict,
    )


def _window_sums_bounded(values: list, tau: Fraction) -> bool:
    """|sum over every sub-window| <= tau."""
    prefix = [Fraction(0)]
    for v in values:
        prefix.append(prefix[-1] + v)
    if all(not p.imag for p in prefix):
        return max(prefix) - min(prefix) <= tau
    limit = tau * tau
    return all(scalar_norm(prefix[v] - prefix[u]) <= limit
               for u in range(len(prefix)) for v in range(u + 1, len(prefix)))


def lemma33_check(Qs: list[UniPoly], f: Sequence, a: int, b: int, L: int, kappa, tau,
                  tolerance=None) -> LemmaReport:
    """
    Delta(n) != 0 for some n in [a, b], by exhaustive evaluation.

    Hypotheses (i)-(iv) and (I)-(II) are certified first and reported
    separately; (II) is checked for every sub-window of [a, b].
    """
    kappa, tau = Fraction(kappa), Fraction(tau)
    m = len(Qs)
    D = _degree_bound(Qs)
    hypotheses = {"Q_nonzero": HypothesisStatus.FAILED if all(q.is_zero for q in Qs)
                  else HypothesisStatus.VERIFIED}

    e2 = e_power(2)
    if (b - a) * kappa > 4 * tau * (m - 1) * e2.upper:
        hypotheses["i"] = HypothesisStatus.VERIFIED
    elif (b - a) * kappa <= 4 * tau * (m - 1) * e2.lower:
        hypotheses["i"] = HypothesisStatus.FAILED
    else:
        hypotheses["i"] = HypothesisStatus.INCONCLUSIVE

    threshold = Fraction(a, L * D)
    hypotheses["ii"] = _refined_root_distance(Qs, a, b, threshold, tolerance)
    hypotheses["iii"] = (HypothesisStatus.VERIFIED if Fraction(b - a, a) <= Fraction(1, D * D * L)
                         else HypothesisStatus.FAILED)
    pair_polys = [critical_polynomials(Qs[i] * Qs[j]) for i in range(m) for j in range(i + 1, m)]
    hypotheses["iv"] = (HypothesisStatus.FAILED
                        if any(_critical_status(p, a, b) == HypothesisStatus.FAILED for p in pair_polys)
                        else HypothesisStatus.VERIFIED)

    energy_ok = all(
        sum(scalar_norm(to_scalar(f(n + j))) for n in range(a, b + 1)) >= kappa * (b - a)
        for j in range(1, m + 1)
    )
    hypotheses["I"] = HypothesisStatus.VERIFIED if energy_ok else HypothesisStatus.FAILED
    correlation_ok = all(
        _window_sums_bounded(
            [to_scalar(f(n + j)) * to_scalar(f(n + k)).conjugate() for n in range(a, b + 1)], tau)
        for j in range(1, m + 1) for k in range(j + 1, m + 1)
    )
    hypotheses["II"] = HypothesisStatus.VERIFIED if correlation_ok else HypothesisStatus.FAILED

    witness = None
    energy = Fraction(0)
    for n in range(a, b + 1):
        value = delta_value(Qs, f, n)
        if value and witness is None:
            witness = n
        energy += scalar_norm(value)

    verdict = _combine(hypotheses.values())
    notes = []
    if verdict == Verdict.HOLDS and witness is None:
        verdict = Verdict.VIOLATED
    elif verdict != Verdict.HOLDS:
        notes.append(f"conclusion {'holds' if witness is not None else 'fails'} on [a, b] regardless")
    return LemmaReport(
        lemma="lemma33", hypotheses=hypotheses,
        lhs=ExactInterval.from_bounds(energy), rhs=ExactInterval.from_bounds(0),
        verdict=verdict, witness=witness, notes=notes,
    )


# ============================================================================
# Composition and reference values
# ============================================================================

@dataclass
class ChainResult:
    """delta_search witness alongside the interval plan and window check built from A = 4 tau/kappa."""
    witness: DeltaWitness
    plan: IntervalPlan
    window_report: LemmaReport

    @property
    def witness_in_window(self) -> bool:
        return self.witness.n <= self.plan.b


def prop32_chain(f: Sequence, Qs: list[UniPoly], kappa, tau,
                 tolerance=None) -> ChainResult:
    kappa, tau = Fraction(kappa), Fraction(tau)
    witness = delta_search(f, Qs, kappa, tau)
    D = _degree_bound(Qs)
    plan = interval_plan(Qs, max(Fraction(1), 4 * tau / kappa), D, len(Qs), tolerance)
    report = lemma33_check(Qs, f, plan.a, plan.b, plan.L, kappa, tau, tolerance)
    result = ChainResult(witness=witness, plan=plan, window_report=report)
    if not result.witness_in_window:
        logger.warning(f"Witness n={witness.n} lies beyond the window b={plan.b}")
    return result


def theorem_reference(p: int, n: int) -> float:
    """(N / (sqrt(p) log p))^(1/10); shape only, no implied constant."""
    if n < 1:
        raise PreconditionError("N must be positive")
    return (n / (math.sqrt(p) * math.log(p))) ** 0.1
