"""
Holonomy Service for FeketeLab.
Annihilating polynomial -> linear ODE -> P-recurrence, power-series roots by
Newton lifting, forward extension of holonomic sequences and the order/degree
bound reports.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from services import power_series
from services.exact_poly import (
    BiPoly,
    NotInvertibleError,
    UniPoly,
    ext_gcd_mod_h,
    normalize_polys,
    normalize_scalars,
    to_scalar,
)
from services.linear_algebra import bareiss_kernel, gauss_jordan_kernel, polynomial_kernel
from services.schemas import (
    BoundReport,
    LinearODEModel,
    PRecurrenceModel,
    poly_from_json,
    poly_to_json,
)

logger = logging.getLogger(__name__)

# Extra series terms used when checking an ODE against a series root
ODE_CHECK_GUARD = 8


# ============================================================================
# Custom Exceptions
# ============================================================================

class HolonomyError(Exception):
    """Base holonomy error."""
    pass


class ReducibleAnnihilatorError(HolonomyError):
    """h_Y is not invertible modulo h: h has a repeated factor."""
    def __init__(self, message: str, factor: Optional[BiPoly] = None):
        super().__init__(message)
        self.factor = factor


class SingularBranchError(HolonomyError):
    """h_Y(0, A_0) = 0: the supplied terms do not pick a smooth branch."""
    pass


class SingularIndexError(HolonomyError):
    """Leading recurrence coefficient vanishes at a needed index."""
    def __init__(self, index: int):
        super().__init__(f"P_L vanishes at n = {index}; supply A_{{n+L}} explicitly to continue")
        self.index = index


# ============================================================================
# Data Classes
# ============================================================================

@dataclass(frozen=True)
class LinearODE:
    """sum_i Q_i(X) G^(i)(X) = 0 with Q_N nonzero."""
    coeffs: tuple[UniPoly, ...]

    def __post_init__(self):
        if not self.coeffs or self.coeffs[-1].is_zero:
            raise HolonomyError("leading ODE coefficient must be nonzero")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def max_degree(self) -> int:
        return max(q.degree for q in self.coeffs)

    def to_model(self) -> LinearODEModel:
        return LinearODEModel(order=self.order, coeffs=[poly_to_json(q) for q in self.coeffs])

    @classmethod
    def from_model(cls, model: LinearODEModel) -> "LinearODE":
        return cls(tuple(poly_from_json(c) for c in model.coeffs))

    def __str__(self):
        terms = []
        for i, q in enumerate(self.coeffs):
            if q.is_zero:
                continue
            g = "G" if i == 0 else "G'" if i == 1 else f"G^({i})"
            terms.append(f"({q.to_string('X')})*{g}")
        return " + ".join(terms) + " = 0"


@dataclass(frozen=True)
class PRecurrence:
    """sum_j P_j(n) A_{n+j} = 0 for all n >= 0, with P_L nonzero."""
    coeffs: tuple[UniPoly, ...]

    def __post_init__(self):
        if not self.coeffs or self.coeffs[-1].is_zero:
            raise HolonomyError("leading recurrence coefficient must be nonzero")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def max_degree(self) -> int:
        return max(p.degree for p in self.coeffs)

    @property
    def leading(self) -> UniPoly:
        return self.coeffs[-1]

    def to_model(self) -> PRecurrenceModel:
        return PRecurrenceModel(order=self.order, coeffs=[poly_to_json(p) for p in self.coeffs])

    @classmethod
    def from_model(cls, model: PRecurrenceModel) -> "PRecurrence":
        return cls(tuple(poly_from_json(c) for c in model.coeffs))

    def __str__(self):
        terms = []
        for j, p in enumerate(self.coeffs):
            if p.is_zero:
                continue
            index = "n" if j == 0 else f"n+{j}"
            terms.append(f"({p.to_string('n')})*A_{{{index}}}")
        return " + ".join(terms) + " = 0"


# ============================================================================
# Quotient ring Q(i)(X)[Y]/(h)
# ============================================================================

# X value at which cleared matrices are specialized for the rank screen
SCREEN_POINT = Fraction(7, 3)


@dataclass(frozen=True)
class QuotientElement:
    """numerator / (delta^delta_power * lc_Y(h)^lead_power), deg_Y numerator < deg_Y h."""
    numerator: BiPoly
    delta_power: int = 0
    lead_power: int = 0


class QuotientRing:
    """
    Arithmetic modulo h where every denominator is delta^e * lc_Y(h)^f.

    delta is the denominator of 1/h_Y modulo h. Only exact divisions by
    delta and lc_Y(h) are attempted, never a general polynomial gcd.
    """

    def __init__(self, h: BiPoly):
        self.h = h
        self.dy = h.deg_y
        self.lead = h.y_coefficient(self.dy)
        self.lead_prime = self.lead.derivative()
        try:
            inverse = ext_gcd_mod_h(h.derivative_y(), h)
        except NotInvertibleError as e:
            logger.error(f"h_Y is not invertible modulo h: {e}")
            raise ReducibleAnnihilatorError(str(e), factor=e.factor) from e
        self.delta = inverse.denominator
        self.delta_prime = self.delta.derivative()
        self._powers: dict[tuple[bool, int], UniPoly] = {}
        # G' = -h_X / h_Y
        self.gprime = self.reduce(-(h.derivative_x() * inverse.numerator), 1, 0)

    def power(self, exponent: int, of_delta: bool = True) -> UniPoly:
        key = (of_delta, exponent)
        if key not in self._powers:
            self._powers[key] = (self.delta if of_delta else self.lead) ** exponent
        return self._powers[key]

    def denominator(self, element: QuotientElement) -> UniPoly:
        return self.power(element.delta_power) * self.power(element.lead_power, of_delta=False)

    @staticmethod
    def _strip(numerator: BiPoly, factor: UniPoly, power: int) -> tuple[BiPoly, int]:
        """Cancel factors of `factor` shared by every Y-coefficient and factor^power."""
        if factor.degree < 1:
            return numerator, power
        while power > 0:
            parts = [p.divmod(factor) for p in numerator.ycoeffs]
            if any(not r.is_zero for _, r in parts):
                break
            numerator = BiPoly(q for q, _ in parts)
            power -= 1
        return numerator, power

    def reduce(self, numerator: BiPoly, delta_power: int = 0, lead_power: int = 0) -> QuotientElement:
        remainder, exponent = numerator.pseudo_remainder(self.h)
        if remainder.is_zero:
            return QuotientElement(BiPoly())
        remainder, delta_power = self._strip(remainder, self.delta, delta_power)
        remainder, lead_power = self._strip(remainder, self.lead, lead_power + exponent)
        return QuotientElement(remainder, delta_power, lead_power)

    def differentiate(self, element: QuotientElement) -> QuotientElement:
        """d/dX of N / (delta^e lc^f), with G' = N_1 / (delta^a0 lc^b0)."""
        if element.numerator.is_zero:
            return element
        n, e, f = element.numerator, element.delta_power, element.lead_power
        g = self.gprime
        a, b = max(g.delta_power, 1), max(g.lead_power, 1)
        delta_a, lead_b = self.power(a), self.power(b, of_delta=False)
        log_derivative = self.delta_prime * self.power(a - 1) * lead_b * e \
            + self.lead_prime * delta_a * self.power(b - 1, of_delta=False) * f
        chain = g.numerator * (self.power(a - g.delta_power)
                               * self.power(b - g.lead_power, of_delta=False))
        numerator = n.derivative_x() * (delta_a * lead_b) - n * log_derivative \
            + n.derivative_y() * chain
        return self.reduce(numerator, e + a, f + b)

    def cleared_columns(self, elements: list[QuotientElement]) -> list[list[UniPoly]]:
        """Y-coefficients of each element times the common denominator."""
        top_delta = max(el.delta_power for el in elements)
        top_lead = max(el.lead_power for el in elements)
        columns = []
        for el in elements:
            scale = self.power(top_delta - el.delta_power) \
                * self.power(top_lead - el.lead_power, of_delta=False)
            columns.append([el.numerator.y_coefficient(j) * scale for j in range(self.dy)])
        return columns


def _primitive_row(row: list[UniPoly]) -> list[UniPoly]:
    _, multiplier = normalize_scalars([c for p in row for c in p.coeffs])
    return [p * multiplier for p in row]


def _remove_content(vector: list[UniPoly]) -> list[UniPoly]:
    common = UniPoly.zero()
    for v in vector:
        if v.is_zero:
            continue
        common = common.gcd(v)
        if common.degree == 0:
            return vector
    return [v // common for v in vector]


def _independent_at_screen_point(rows: list[list[UniPoly]], ncols: int) -> bool:
    """Full column rank after X = SCREEN_POINT implies full rank over Q(i)(X)."""
    values = [[p(SCREEN_POINT) for p in row] for row in rows]
    return not gauss_jordan_kernel(values, ncols)


def _solve_minimal_order(ring: QuotientRing, elements: list[QuotientElement]) -> Optional[list[UniPoly]]:
    columns = ring.cleared_columns(elements)
    rows = [_primitive_row([column[j] for column in columns]) for j in range(ring.dy)]
    rows = [row for row in rows if any(not p.is_zero for p in row)]
    if _independent_at_screen_point(rows, len(elements)):
        return None
    kernel = polynomial_kernel(rows, len(elements), one=UniPoly.one())
    if not kernel:
        return None
    return _remove_content(kernel[0])


def _solve_degree_capped(ring: QuotientRing, elements: list[QuotientElement], cap: int) -> Optional[list[UniPoly]]:
    """Polynomial Q_i of degree <= cap with sum Q_i V_i = 0, as an exact linear system."""
    scaled = ring.cleared_columns(elements)
    width = cap + 1
    ncols = len(elements) * width
    top = max((p.degree for column in scaled for p in column), default=0)
    rows = []
    for j in range(ring.dy):
        for k in range(cap + top + 1):
            row = [Fraction(0)] * ncols
            for i, column in enumerate(scaled):
                poly = column[j]
                for e in range(width):
                    if 0 <= k - e <= poly.degree:
                        row[i * width + e] = poly[k - e]
            if any(row):
                rows.append(row)

    if all(not v.imag for row in rows for v in row):
        kernel = bareiss_kernel(rows, ncols)
    else:
        kernel = gauss_jordan_kernel(rows, ncols)
    if not kernel:
        return None
    vector = kernel[0]
    return [UniPoly(vector[i * width:(i + 1) * width]) for i in range(len(elements))]


def _annihilates(ring: QuotientRing, elements: list[QuotientElement], coeffs: list[UniPoly]) -> bool:
    columns = ring.cleared_columns(elements)
    for j in range(ring.dy):
        total = UniPoly.zero()
        for q, column in zip(coeffs, columns):
            if not q.is_zero:
                total = total + q * column[j]
        if not total.is_zero:
            return False
    return True


def _trim(coeffs: list[UniPoly]) -> list[UniPoly]:
    coeffs = list(coeffs)
    while coeffs and coeffs[-1].is_zero:
        coeffs.pop()
    return coeffs


def algebraic_to_ode(h: BiPoly, branch: Optional[list] = None) -> LinearODE:
    """
    Linear ODE annihilating every power-series root of h.

    The minimal-order relation among G, G', ... in Q(i)(X)[Y]/(h) is found
    first. When its coefficient degree exceeds 3 deg_X h deg_Y h, orders up to
    6 deg_Y h are searched with that degree cap and the first success is used.

    Args:
        h: annihilating polynomial with deg_Y h >= 1
        branch: optional initial terms; when given the ODE is checked against
            the truncated series root

    Returns:
        LinearODE with primitive Gaussian-integer coefficients

    Raises:
        HolonomyError: deg_Y h < 1 or the a-posteriori check fails
        ReducibleAnnihilatorError: h_Y not invertible modulo h
    """
    if h.deg_y < 1:
        raise HolonomyError("annihilating polynomial must have positive degree in Y")

    ring = QuotientRing(h)
    elements = [ring.reduce(BiPoly.y())]

    coeffs = None
    while coeffs is None:
        coeffs = _solve_minimal_order(ring, elements)
        if coeffs is None:
            elements.append(ring.differentiate(elements[-1]))
    minimal_order = len(elements) - 1
    logger.debug(f"Minimal-order relation found at order {minimal_order}")

    cap = 3 * h.deg_x * h.deg_y
    if max(q.degree for q in coeffs) > cap:
        logger.info(f"Minimal-order ODE has degree {max(q.degree for q in coeffs)} > {cap}; "
                    f"searching orders up to {6 * h.deg_y}")
        for order in range(minimal_order, 6 * h.deg_y + 1):
            while len(elements) < order + 1:
                elements.append(ring.differentiate(elements[-1]))
            capped = _solve_degree_capped(ring, elements[:order + 1], cap)
            if capped is not None:
                coeffs = capped
                logger.info(f"Degree-capped ODE found at order {len(_trim(capped)) - 1}")
                break
        else:
            logger.warning(f"No ODE with coefficient degree <= {cap} up to order {6 * h.deg_y}; "
                           f"keeping the minimal-order ODE")

    coeffs = _trim(coeffs)
    if not _annihilates(ring, elements[:len(coeffs)], coeffs):
        raise HolonomyError("derived ODE does not vanish in the quotient ring")
    ode = LinearODE(tuple(normalize_polys(coeffs, lead_first=len(coeffs) - 1)))
    logger.info(f"ODE of order {ode.order}, degree {ode.max_degree} for h = {h}")

    if branch is not None:
        count = 2 * (ode.order + ode.max_degree + ODE_CHECK_GUARD)
        series = series_root(h, branch, count)
        if not ode_annihilates_series(ode, series):
            raise HolonomyError("derived ODE does not annihilate the series root")
    return ode


# ============================================================================
# ODE -> recurrence
# ============================================================================

def _rising(offset: int, length: int) -> UniPoly:
    """(T + offset)(T + offset + 1)...(T + offset + length - 1)."""
    result = UniPoly.one()
    for t in range(length):
        result = result * UniPoly([offset + t, 1])
    return result


def ode_to_recurrence(ode: LinearODE) -> PRecurrence:
    """
    Coefficient extraction: [X^n] X^k G^(i) = rising(n-k+1, i) A_{n-k+i}.

    Shifts s = i - k are collected into c_s(n); with offset = min(lowest s, 0)
    the relation is re-indexed as sum_j P_j(T) A_{T+j}, P_j(T) = c_{j+offset}(T - offset),
    which holds for every T >= 0 under A_n = 0 for n < 0.
    """
    by_shift: dict[int, UniPoly] = {}
    for i, q in enumerate(ode.coeffs):
        for k, c in enumerate(q.coeffs):
            if not c:
                continue
            shift = i - k
            term = _rising(1 - k, i).scale(c)
            by_shift[shift] = by_shift.get(shift, UniPoly.zero()) + term
    by_shift = {s: p for s, p in by_shift.items() if not p.is_zero}
    if not by_shift:
        raise HolonomyError("ODE yields an identically zero recurrence")

    offset = min(min(by_shift), 0)
    upper = max(by_shift)
    coeffs = [by_shift.get(j + offset, UniPoly.zero()).shift(-offset)
              for j in range(upper - offset + 1)]
    rec = PRecurrence(tuple(_trim(coeffs)))
    logger.debug(f"Recurrence of order {rec.order}: {rec}")
    return rec


# ============================================================================
# Series and sequences
# ============================================================================

def series_root(h: BiPoly, branch: list, count: int) -> list:
    """
    Power-series root A_0..A_{count-1} of h by Newton lifting (precision doubles per step).

    Args:
        h: annihilating polynomial
        branch: initial coefficients, at least A_0; extra terms are checked
        count: number of coefficients wanted

    Raises:
        HolonomyError: A_0 is not a root of h(0, Y) or extra terms disagree
        SingularBranchError: h_Y(0, A_0) = 0
    """
    if not branch:
        raise HolonomyError("series_root needs at least the constant term A_0")
    initial = [to_scalar(c) for c in branch]
    a0 = initial[0]
    if h.evaluate(0, a0):
        raise HolonomyError(f"A_0 = {a0} is not a root of h(0, Y)")
    hy = h.derivative_y()
    if not hy.evaluate(0, a0):
        raise SingularBranchError(
            f"h_Y(0, {a0}) = 0: the branch is singular; supply more initial terms (unsupported)"
        )

    target = max(count, len(initial))
    series = [a0]
    precision = 1
    while precision < target:
        precision = min(2 * precision, target)
        series = power_series.truncate(series, precision)
        value = power_series.evaluate_bipoly(h, series, precision)
        slope = power_series.evaluate_bipoly(hy, series, precision)
        step = power_series.mul(value, power_series.inverse(slope, precision), precision)
        series = power_series.sub(series, step, precision)

    for k, c in enumerate(initial):
        if series[k] != c:
            raise HolonomyError(f"supplied A_{k} = {c} disagrees with the branch value {series[k]}")
    return series[:count]


def apply_ode(ode: LinearODE, series: list) -> list:
    """Residue sum_i Q_i G^(i) over the len(series) - N coefficients it determines."""
    n = len(series) - ode.order
    if n <= 0:
        return []
    total = [Fraction(0)] * n
    derived = list(series)
    for q in ode.coeffs:
        total = power_series.add(total, power_series.mul(list(q.coeffs), derived, n), n)
        derived = power_series.derivative(derived)
    return total


def ode_annihilates_series(ode: LinearODE, series: list) -> bool:
    return all(not c for c in apply_ode(ode, series))


def extend(rec: PRecurrence, initial: list, count: int) -> list:
    """
    Extend a sequence to `count` terms by solving for A_{n+L}.

    Raises:
        HolonomyError: fewer than L initial terms
        SingularIndexError: P_L(n) = 0 at the earliest needed n
    """
    order = rec.order
    terms = [to_scalar(c) for c in initial]
    if len(terms) < order:
        raise HolonomyError(f"extend needs at least L = {order} initial terms, got {len(terms)}")
    if count <= len(terms):
        return terms[:count]
    while len(terms) < count:
        n = len(terms) - order
        lead = rec.leading(n)
        if not lead:
            logger.error(f"Singular index {n} while extending recurrence of order {order}")
            raise SingularIndexError(n)
        total = sum((rec.coeffs[j](n) * terms[n + j] for j in range(order)), Fraction(0))
        terms.append(to_scalar(-total / lead))
    return terms


def verify_annihilates(rec: PRecurrence, terms: list) -> bool:
    """True iff sum_j P_j(n) terms[n+j] = 0 for every n with n + L < len(terms)."""
    order = rec.order
    if len(terms) <= order:
        raise HolonomyError(f"need more than L = {order} terms to verify")
    for n in range(len(terms) - order):
        if sum((rec.coeffs[j](n) * terms[n + j] for j in range(order + 1)), Fraction(0)):
            return False
    return True


def singular_indices(rec: PRecurrence) -> list[int]:
    """Nonnegative integer roots of P_L."""
    lead = rec.leading
    real, imag = lead.real_imag_split()
    poly = real.gcd(imag) if not imag.is_zero else real
    if poly.degree < 1:
        return []
    monic = poly.monic()
    bound = 1 + max(abs(Fraction(c)) for c in monic.coeffs[:-1])
    return [n for n in range(int(bound) + 1) if not poly(n)]


def safe_prefix_length(rec: PRecurrence, minimum: int = 0) -> int:
    """Initial terms needed so extension never solves at a singular index."""
    indices = singular_indices(rec)
    needed = max(indices) + rec.order + 1 if indices else rec.order
    return max(needed, minimum, rec.order)


# ============================================================================
# Bound reports
# ============================================================================

def check_bounds(h: BiPoly, ode: LinearODE, rec: PRecurrence) -> list[BoundReport]:
    """ODE order/degree and recurrence order/degree against their stated bounds."""
    d = h.total_degree
    return [
        BoundReport.evaluate("ode_order", ode.order, 6 * h.deg_y, "N <= 6 deg_Y h"),
        BoundReport.evaluate("ode_degree", ode.max_degree, 3 * h.deg_x * h.deg_y,
                             "D <= 3 deg_X h deg_Y h"),
        BoundReport.evaluate("recurrence_order", rec.order, 4 * d * d, "L <= 4 d^2"),
        BoundReport.evaluate("recurrence_degree", rec.max_degree, 3 * (d + 1) ** 2,
                             "deg_T P_j <= 3 (d+1)^2"),
    ]


def audit_bounds(h: BiPoly, ode: LinearODE, rec: PRecurrence) -> list[BoundReport]:
    """check_bounds plus the proof-sketch expressions; report only."""
    d = h.total_degree
    reports = check_bounds(h, ode, rec)
    reports += [
        BoundReport.evaluate("recurrence_order_sketch", rec.order, 3 * d * d + 6 * d,
                             "L <= 3 d^2 + 6 d"),
        BoundReport.evaluate("recurrence_order_n_plus_d", rec.order, ode.order + ode.max_degree,
                             "L <= N + D"),
        BoundReport.evaluate("n_plus_d", ode.order + ode.max_degree, 3 * (d + 1) ** 2,
                             "N + D <= 3 (d+1)^2"),
        BoundReport.evaluate("recurrence_degree_vs_ode_degree", rec.max_degree, ode.max_degree,
                             "deg_T P_j <= D"),
    ]
    for report in reports[2:]:
        if not report.satisfied:
            logger.warning(f"Stated bound violated for h = {h}: {report.formula} "
                           f"(measured {report.measured}, bound {report.bound})")
    return reports
