"""
Report Schemas for FeketeLab.
Pydantic models for every report the services emit, plus the canonical
JSON encoding of exact scalars and polynomials.
"""

from enum import Enum
from fractions import Fraction
from typing import Any, Optional, Union

from pydantic import BaseModel, Field, model_validator

# Exact values on the wire: rationals as [num, den], Gaussian rationals as
# [[re_num, re_den], [im_num, im_den]].
RationalPair = tuple[int, int]
GaussianPair = tuple[RationalPair, RationalPair]
JsonScalar = Union[RationalPair, GaussianPair]


# ============================================================================
# Exact value encoding
# ============================================================================

def rational_to_pair(value) -> RationalPair:
    value = Fraction(value)
    return (value.numerator, value.denominator)


def pair_to_rational(pair) -> Fraction:
    return Fraction(int(pair[0]), int(pair[1]))


def scalar_to_json(value) -> JsonScalar:
    """Encode a Fraction or GaussianRational (anything with .real/.imag)."""
    if not value.imag:
        return rational_to_pair(value.real)
    return (rational_to_pair(value.real), rational_to_pair(value.imag))


def scalar_from_json(data):
    from services.exact_poly import make_scalar

    if isinstance(data[0], (list, tuple)):
        return make_scalar(pair_to_rational(data[0]), pair_to_rational(data[1]))
    return pair_to_rational(data)


def poly_to_json(poly) -> list[JsonScalar]:
    return [scalar_to_json(c) for c in poly.coeffs]


def poly_from_json(data):
    from services.exact_poly import UniPoly

    return UniPoly(scalar_from_json(c) for c in data)


# ============================================================================
# Shared report pieces
# ============================================================================

class HypothesisStatus(str, Enum):
    """Certification status of one hypothesis."""
    VERIFIED = "verified"
    FAILED = "failed"
    INCONCLUSIVE = "inconclusive"


class Verdict(str, Enum):
    """Outcome of a lemma or plan check."""
    HOLDS = "HOLDS"
    VIOLATED = "VIOLATED"
    HYPOTHESIS_FAILED = "HYPOTHESIS_FAILED"
    INCONCLUSIVE = "INCONCLUSIVE"


class ExactInterval(BaseModel):
    """Closed rational interval [lower, upper]; a point when lower == upper."""
    lower: RationalPair
    upper: RationalPair

    @classmethod
    def from_bounds(cls, lower, upper=None) -> "ExactInterval":
        upper = lower if upper is None else upper
        return cls(lower=rational_to_pair(lower), upper=rational_to_pair(upper))

    @property
    def lower_value(self) -> Fraction:
        return pair_to_rational(self.lower)

    @property
    def upper_value(self) -> Fraction:
        return pair_to_rational(self.upper)

    @model_validator(mode="after")
    def _ordered(self):
        if self.lower_value > self.upper_value:
            raise ValueError("interval lower bound exceeds upper bound")
        return self


# ============================================================================
# number_theory
# ============================================================================

class CharSumReport(BaseModel):
    """Maximal (shifted) character sum over a scanned family of intervals."""
    p: int
    shift_pair: Optional[tuple[int, int]] = None
    interval: tuple[int, int] = Field(..., description="(start, length)")
    value: int
    normalized: float = Field(..., description="approximate |value| / (sqrt(p) log p)")

    @model_validator(mode="after")
    def _within_length(self):
        if abs(self.value) > self.interval[1]:
            raise ValueError("character sum exceeds its interval length")
        return self


# ============================================================================
# holonomy
# ============================================================================

class BoundReport(BaseModel):
    """Measured quantity against a stated bound."""
    quantity: str
    measured: int
    bound: int
    satisfied: bool
    formula: str

    @classmethod
    def evaluate(cls, quantity: str, measured: int, bound: int, formula: str) -> "BoundReport":
        return cls(quantity=quantity, measured=measured, bound=bound,
                   satisfied=measured <= bound, formula=formula)

    @model_validator(mode="after")
    def _consistent(self):
        if self.satisfied != (self.measured <= self.bound):
            raise ValueError("satisfied flag disagrees with measured <= bound")
        return self


class LinearODEModel(BaseModel):
    """Canonical JSON of sum_i Q_i(X) G^(i)(X) = 0."""
    order: int
    coeffs: list[list[JsonScalar]]


class PRecurrenceModel(BaseModel):
    """Canonical JSON of sum_j P_j(n) A_{n+j} = 0."""
    order: int
    coeffs: list[list[JsonScalar]]


class Alg2RecReport(BaseModel):
    h: list[list[JsonScalar]]
    ode: LinearODEModel
    recurrence: PRecurrenceModel
    bounds: list[BoundReport]


# ============================================================================
# guesser
# ============================================================================

class AlgebraicGuessModel(BaseModel):
    per_variable_degree: int
    residual_order: int
    total_degree: int
    h: list[list[JsonScalar]] = Field(..., description="rows = Y-degree, columns = X-degree")


class DpnResult(BaseModel):
    """One (p, N) cell of the d_p(N) grid."""
    p: int
    N: int
    d: int
    witness_h: list[list[JsonScalar]]
    witness_total_degree: int
    theorem_reference_value: float
    reference_ratio: float = Field(..., description="d / theorem_reference_value, shape only")
    chain_shape: float = Field(..., description="d^10 (sqrt(p) log p + d^4), compared with N")
    chain_shape_exceeds_n: bool
    n_at_least_p: bool = False


# ============================================================================
# oscillation
# ============================================================================

class ConditionCertificate(BaseModel):
    name: str
    status: HypothesisStatus
    detail: str = ""


class IntervalPlan(BaseModel):
    """Certified interval [a, b] of the recursive R_i construction."""
    a: int
    b: int
    L: int
    A: RationalPair
    D: int
    m: int
    R_sequence: list[int]
    chosen_index: int = Field(..., description="1-based index i with a = D^2 L R_i")
    conditions: list[ConditionCertificate]
    size_bound: ExactInterval = Field(..., description="enclosure of 20 A e^3 D^2 m^3 (A + D m)")
    padded_intervals_disjoint: bool = Field(
        ..., description="no padded interval overlaps the next beyond a shared endpoint")
    padded_contacts: list[int] = Field([], description="endpoints shared by consecutive padded intervals")
    notes: list[str] = []

    @property
    def certified(self) -> bool:
        return all(c.status == HypothesisStatus.VERIFIED for c in self.conditions)


class DeltaWitness(BaseModel):
    """First n with Delta(n) != 0 below the evaluated bound."""
    n: int
    delta_value: JsonScalar
    bound: ExactInterval
    m: int
    D: int
    kappa: RationalPair
    tau: RationalPair


class LemmaReport(BaseModel):
    """Hypothesis status per condition, both sides of the inequality, verdict."""
    lemma: str
    hypotheses: dict[str, HypothesisStatus]
    lhs: Optional[ExactInterval] = None
    rhs: Optional[ExactInterval] = None
    verdict: Verdict
    witness: Optional[int] = None
    notes: list[str] = []

    @property
    def holds(self) -> bool:
        return self.verdict == Verdict.HOLDS


class CriticalSetModel(BaseModel):
    real_points: list[tuple[JsonScalar, RationalPair]] = Field(
        ..., description="(center, radius) of certified real critical abscissae")
    complex_points: list[tuple[JsonScalar, RationalPair, int]]


# ============================================================================
# experiments
# ============================================================================

class SuiteResult(BaseModel):
    """Outcome of one acceptance suite."""
    criterion: int
    name: str
    passed: bool
    checks: int = 0
    failures: list[str] = []
    details: dict[str, Any] = {}


def schema_bundle() -> dict[str, dict]:
    """JSON schemas of every emitted report type."""
    models = [CharSumReport, BoundReport, Alg2RecReport, LinearODEModel, PRecurrenceModel,
              AlgebraicGuessModel, DpnResult, IntervalPlan, DeltaWitness, LemmaReport,
              CriticalSetModel, SuiteResult]
    return {model.__name__: model.model_json_schema() for model in models}
