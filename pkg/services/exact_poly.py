"""
Exact Polynomial Service for FeketeLab.
Gaussian-rational scalars, univariate and bivariate polynomials, rational
functions and modular inversion in the quotient ring K(X)[Y]/(h).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Optional, Union

logger = logging.getLogger(__name__)

# Exact rationals are plain fractions: always reduced, positive denominator.
ExactRational = Fraction


# ============================================================================
# Custom Exceptions
# ============================================================================

class ExactPolyError(Exception):
    """Base exact polynomial error."""
    pass


class NotInvertibleError(ExactPolyError):
    """Raised when an element has no inverse modulo h (gcd of positive Y-degree)."""
    def __init__(self, message: str, factor: "BiPoly" = None):
        super().__init__(message)
        self.factor = factor


# ============================================================================
# Gaussian rationals
# ============================================================================

class GaussianRational:
    """
    Element of Q(i) with exact rational real and imaginary parts.

    Arithmetic results with a zero imaginary part collapse back to Fraction,
    so purely real computations stay on the fast path.
    """

    __slots__ = ("real", "imag")

    def __init__(self, real=0, imag=0):
        self.real = Fraction(real)
        self.imag = Fraction(imag)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.real, -self.imag)

    def norm(self) -> Fraction:
        return self.real * self.real + self.imag * self.imag

    def __add__(self, other):
        parts = _parts(other)
        if parts is None:
            return NotImplemented
        return make_scalar(self.real + parts[0], self.imag + parts[1])

    __radd__ = __add__

    def __sub__(self, other):
        parts = _parts(other)
        if parts is None:
            return NotImplemented
        return make_scalar(self.real - parts[0], self.imag - parts[1])

    def __rsub__(self, other):
        parts = _parts(other)
        if parts is None:
            return NotImplemented
        return make_scalar(parts[0] - self.real, parts[1] - self.imag)

    def __mul__(self, other):
        parts = _parts(other)
        if parts is None:
            return NotImplemented
        c, d = parts
        return make_scalar(self.real * c - self.imag * d, self.real * d + self.imag * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        parts = _parts(other)
        if parts is None:
            return NotImplemented
        c, d = parts
        n = c * c + d * d
        if not n:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return make_scalar(
            (self.real * c + self.imag * d) / n,
            (self.imag * c - self.real * d) / n,
        )

    def __rtruediv__(self, other):
        parts = _parts(other)
        if parts is None:
            return NotImplemented
        return GaussianRational(*parts) / self

    def __neg__(self):
        return GaussianRational(-self.real, -self.imag)

    def __pos__(self):
        return self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return 1 / (self ** -exponent)
        result, base = Fraction(1), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __bool__(self):
        return bool(self.real) or bool(self.imag)

    def __eq__(self, other):
        parts = _parts(other)
        if parts is None:
            return NotImplemented
        return self.real == parts[0] and self.imag == parts[1]

    def __hash__(self):
        if not self.imag:
            return hash(self.real)
        return hash((self.real, self.imag))

    def __complex__(self):
        return complex(float(self.real), float(self.imag))

    def __repr__(self):
        return f"GaussianRational({self.real}, {self.imag})"

    def __str__(self):
        if not self.real:
            return f"{self.imag}*i"
        sign = "+" if self.imag > 0 else "-"
        return f"({self.real} {sign} {abs(self.imag)}*i)"


Scalar = Union[Fraction, GaussianRational]


def _parts(value) -> Optional[tuple[Fraction, Fraction]]:
    if isinstance(value, GaussianRational):
        return value.real, value.imag
    if isinstance(value, (int, Fraction)):
        return Fraction(value), Fraction(0)
    return None


def make_scalar(real, imag=0) -> Scalar:
    """Build a scalar, collapsing to Fraction when the imaginary part vanishes."""
    if imag:
        return GaussianRational(real, imag)
    return Fraction(real)


def to_scalar(value) -> Scalar:
    """Coerce ints, fractions, decimal strings and Gaussian rationals to a scalar."""
    if isinstance(value, GaussianRational):
        return value if value.imag else value.real
    if isinstance(value, Fraction):
        return value
    if isinstance(value, complex):
        raise TypeError("floating complex values are not exact; use GaussianRational")
    return Fraction(value)


def scalar_norm(value) -> Fraction:
    """|value|^2 as an exact rational."""
    return Fraction(value.real) ** 2 + Fraction(value.imag) ** 2


def is_real_scalar(value) -> bool:
    return not value.imag


def normalize_scalars(values: list) -> tuple[list, Scalar]:
    """
    Scale a vector of scalars to a primitive Gaussian-integer vector.

    The first nonzero entry ends up with positive real part (or zero real
    part and positive imaginary part).

    Returns:
        (scaled values, multiplier used)
    """
    nonzero = [v for v in values if v]
    if not nonzero:
        return list(values), Fraction(1)
    denominators = [Fraction(v.real).denominator for v in nonzero]
    denominators += [Fraction(v.imag).denominator for v in nonzero]
    common = reduce(lcm, denominators, 1)
    numerators = []
    for v in nonzero:
        numerators.append(int(Fraction(v.real) * common))
        numerators.append(int(Fraction(v.imag) * common))
    content = reduce(gcd, numerators, 0) or 1
    multiplier = Fraction(common, content)
    lead = nonzero[0]
    if lead.real < 0 or (lead.real == 0 and lead.imag < 0):
        multiplier = -multiplier
    return [to_scalar(v * multiplier) for v in values], multiplier


# ============================================================================
# Univariate polynomials
# ============================================================================

class UniPoly:
    """
    Dense univariate polynomial over Q(i), lowest degree first.

    The zero polynomial has an empty coefficient tuple and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        values = [to_scalar(c) for c in coeffs]
        while values and not values[-1]:
            values.pop()
        self.coeffs = tuple(values)

    @classmethod
    def _raw(cls, values: list) -> "UniPoly":
        """Build from already-normalized scalars (trims trailing zeros)."""
        while values and not values[-1]:
            values.pop()
        poly = cls.__new__(cls)
        poly.coeffs = tuple(values)
        return poly

    @classmethod
    def zero(cls) -> "UniPoly":
        return cls._raw([])

    @classmethod
    def one(cls) -> "UniPoly":
        return cls._raw([Fraction(1)])

    @classmethod
    def constant(cls, value) -> "UniPoly":
        return cls([value])

    @classmethod
    def variable(cls) -> "UniPoly":
        return cls._raw([Fraction(0), Fraction(1)])

    @classmethod
    def from_roots(cls, roots: Iterable) -> "UniPoly":
        result = cls.one()
        for r in roots:
            result = result * cls([-to_scalar(r), 1])
        return result

    # -- basic properties ---------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def is_real(self) -> bool:
        return all(not c.imag for c in self.coeffs)

    @property
    def leading_coefficient(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, index: int) -> Scalar:
        if 0 <= index < len(self.coeffs):
            return self.coeffs[index]
        return Fraction(0)

    def __len__(self):
        return len(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.coeffs == UniPoly.constant(other).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    # -- ring operations ----------------------------------------------------

    def _coerce(self, other) -> Optional["UniPoly"]:
        if isinstance(other, UniPoly):
            return other
        if isinstance(other, (int, Fraction, GaussianRational)):
            return UniPoly.constant(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        values = list(a)
        for i, c in enumerate(b):
            values[i] = values[i] + c
        return UniPoly._raw(values)

    __radd__ = __add__

    def __neg__(self):
        return UniPoly._raw([-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.scale(other)
        if not isinstance(other, UniPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return UniPoly.zero()
        values = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                values[i + j] = values[i + j] + x * y
        return UniPoly._raw(values)

    __rmul__ = __mul__

    def scale(self, factor) -> "UniPoly":
        factor = to_scalar(factor)
        if not factor:
            return UniPoly.zero()
        return UniPoly._raw([c * factor for c in self.coeffs])

    def __pow__(self, exponent: int) -> "UniPoly":
        result, base = UniPoly.one(), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def derivative(self) -> "UniPoly":
        return UniPoly._raw([c * k for k, c in enumerate(self.coeffs)][1:])

    def __call__(self, point) -> Scalar:
        """Evaluate by Horner's rule (exact)."""
        result = Fraction(0)
        for c in reversed(self.coeffs):
            result = result * point + c
        return to_scalar(result)

    evaluate = __call__

    # -- field-coefficient division -----------------------------------------

    def divmod(self, divisor: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if divisor.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        remainder = list(self.coeffs)
        dq = divisor.degree
        if len(remainder) - 1 < dq:
            return UniPoly.zero(), self
        lead = divisor.coeffs[-1]
        quotient = [Fraction(0)] * (len(remainder) - dq)
        for k in range(len(remainder) - 1 - dq, -1, -1):
            c = remainder[k + dq] / lead
            quotient[k] = c
            if c:
                for i, dc in enumerate(divisor.coeffs):
                    remainder[k + i] = remainder[k + i] - c * dc
        return UniPoly._raw(quotient), UniPoly._raw(remainder[:dq])

    def __floordiv__(self, divisor: "UniPoly") -> "UniPoly":
        return self.divmod(divisor)[0]

    def __mod__(self, divisor: "UniPoly") -> "UniPoly":
        return self.divmod(divisor)[1]

    def monic(self) -> "UniPoly":
        if self.is_zero:
            return self
        return self.scale(1 / self.leading_coefficient)

    def gcd(self, other: "UniPoly") -> "UniPoly":
        """Monic greatest common divisor (zero only when both are zero)."""
        if self.is_real and other.is_real:
            return _integer_gcd(self, other)
        a, b = self, other
        while not b.is_zero:
            a, b = b, a % b
        return a.monic()

    def lcm(self, other: "UniPoly") -> "UniPoly":
        if self.is_zero or other.is_zero:
            return UniPoly.zero()
        return ((self * other) // self.gcd(other)).monic()

    @property
    def is_one(self) -> bool:
        return self.coeffs == (Fraction(1),)

    # -- transformations ----------------------------------------------------

    def shift(self, offset) -> "UniPoly":
        """Return P(T + offset)."""
        linear = UniPoly([offset, 1])
        result = UniPoly.zero()
        for c in reversed(self.coeffs):
            result = result * linear + c
        return result

    def compose(self, inner: "UniPoly") -> "UniPoly":
        result = UniPoly.zero()
        for c in reversed(self.coeffs):
            result = result * inner + c
        return result

    def conjugate(self) -> "UniPoly":
        return UniPoly._raw([c.conjugate() if isinstance(c, GaussianRational) else c
                             for c in self.coeffs])

    def real_imag_split(self) -> tuple["UniPoly", "UniPoly"]:
        """Return (A, B) with real coefficients and self = A + i*B."""
        return (
            UniPoly._raw([Fraction(c.real) for c in self.coeffs]),
            UniPoly._raw([Fraction(c.imag) for c in self.coeffs]),
        )

    def primitive(self) -> "UniPoly":
        """Primitive Gaussian-integer associate, lowest nonzero coefficient positive."""
        values, _ = normalize_scalars(list(self.coeffs))
        return UniPoly._raw(values)

    def valuation(self) -> int:
        """Index of the lowest nonzero coefficient (-1 for zero)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return -1

    # -- display ------------------------------------------------------------

    def to_string(self, var: str = "X") -> str:
        if self.is_zero:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            monomial = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            terms.append(_format_term(c, monomial))
        return _join_terms(terms)

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"UniPoly({self.to_string()})"


def _format_term(coefficient: Scalar, monomial: str) -> str:
    if isinstance(coefficient, GaussianRational):
        text = str(coefficient)
        return text if not monomial else f"{text}*{monomial}"
    if not monomial:
        return str(coefficient)
    if coefficient == 1:
        return monomial
    if coefficient == -1:
        return f"-{monomial}"
    return f"{coefficient}*{monomial}"


def _join_terms(terms: list[str]) -> str:
    text = terms[0]
    for term in terms[1:]:
        if term.startswith("-"):
            text += f" - {term[1:]}"
        else:
            text += f" + {term}"
    return text


def _content_free(values: list[int]) -> list[int]:
    content = reduce(gcd, values, 0)
    return [v // content for v in values] if content > 1 else values


def _integer_coefficients(poly: UniPoly) -> list[int]:
    values = [Fraction(c.real) for c in poly.coeffs]
    common = reduce(lcm, (v.denominator for v in values), 1)
    return _content_free([int(v * common) for v in values])


def _integer_pseudo_remainder(a: list[int], b: list[int]) -> list[int]:
    """lc(b)^k * a mod b over Z, coefficients lowest degree first."""
    remainder = list(a)
    db = len(b) - 1
    lead = b[-1]
    while remainder and len(remainder) - 1 >= db:
        shift = len(remainder) - 1 - db
        top = remainder[-1]
        remainder = [v * lead for v in remainder]
        for i, bc in enumerate(b):
            remainder[shift + i] -= top * bc
        while remainder and remainder[-1] == 0:
            remainder.pop()
    return remainder


def _integer_gcd(a: UniPoly, b: UniPoly) -> UniPoly:
    """Monic gcd of real polynomials by a primitive remainder sequence over Z."""
    if a.is_zero:
        return b.monic()
    if b.is_zero:
        return a.monic()
    x, y = _integer_coefficients(a), _integer_coefficients(b)
    if len(x) < len(y):
        x, y = y, x
    while y:
        remainder = _integer_pseudo_remainder(x, y)
        x, y = y, _content_free(remainder)
    return UniPoly(Fraction(v) for v in x).monic()


def normalize_polys(polys: list[UniPoly], lead_first: Optional[int] = None) -> list[UniPoly]:
    """
    Scale a list of polynomials by one common scalar to primitive Gaussian-integer form.

    The sign is fixed by the lowest-degree nonzero coefficient of
    ``polys[lead_first]`` (default: the first nonzero polynomial).
    """
    order = list(range(len(polys)))
    if lead_first is not None:
        order = [lead_first] + [i for i in order if i != lead_first]
    flat = [c for i in order for c in polys[i].coeffs]
    _, multiplier = normalize_scalars(flat)
    return [p.scale(multiplier) for p in polys]


# ============================================================================
# Rational functions
# ============================================================================

class RationalFunction:
    """Reduced quotient num/den of polynomials over Q(i), den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: UniPoly, den: Optional[UniPoly] = None):
        den = den if den is not None else UniPoly.one()
        if den.is_zero:
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero:
            self.num, self.den = UniPoly.zero(), UniPoly.one()
            return
        g = num.gcd(den)
        if not g.is_one:
            num, den = num // g, den // g
        lead = den.leading_coefficient
        if lead != 1:
            num, den = num.scale(1 / lead), den.scale(1 / lead)
        self.num, self.den = num, den

    @classmethod
    def from_scalar(cls, value) -> "RationalFunction":
        return cls(UniPoly.constant(value))

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __bool__(self):
        return not self.num.is_zero

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + (-other)

    def __neg__(self) -> "RationalFunction":
        result = RationalFunction.__new__(RationalFunction)
        result.num, result.den = -self.num, self.den
        return result

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        if other.is_zero:
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def derivative(self) -> "RationalFunction":
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def __repr__(self):
        return f"RationalFunction(({self.num}) / ({self.den}))"


# ============================================================================
# Bivariate polynomials
# ============================================================================

class BiPoly:
    """
    Bivariate polynomial h(X, Y) stored as coefficients of Y^j in Q(i)[X].

    ``ycoeffs[j]`` is the UniPoly coefficient of Y^j; the tuple has no
    trailing zero entries, so deg_Y is tight.
    """

    __slots__ = ("ycoeffs",)

    def __init__(self, ycoeffs: Iterable[UniPoly] = ()):
        values = [p if isinstance(p, UniPoly) else UniPoly(p) for p in ycoeffs]
        while values and values[-1].is_zero:
            values.pop()
        self.ycoeffs = tuple(values)

    @classmethod
    def from_grid(cls, rows: list[list]) -> "BiPoly":
        """Rows indexed by Y-degree, columns by X-degree."""
        return cls(UniPoly(row) for row in rows)

    @classmethod
    def from_dict(cls, terms: dict[tuple[int, int], object]) -> "BiPoly":
        """Build from {(deg_X, deg_Y): coefficient}."""
        if not terms:
            return cls()
        dy = max(j for _, j in terms)
        dx = max(i for i, _ in terms)
        rows = [[0] * (dx + 1) for _ in range(dy + 1)]
        for (i, j), value in terms.items():
            rows[j][i] = value
        return cls.from_grid(rows)

    @classmethod
    def y(cls) -> "BiPoly":
        return cls([UniPoly.zero(), UniPoly.one()])

    @classmethod
    def from_x_poly(cls, poly: UniPoly) -> "BiPoly":
        return cls([poly])

    # -- degrees ------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.ycoeffs

    @property
    def deg_y(self) -> int:
        return len(self.ycoeffs) - 1

    @property
    def deg_x(self) -> int:
        if not self.ycoeffs:
            return -1
        return max(p.degree for p in self.ycoeffs)

    @property
    def total_degree(self) -> int:
        degrees = [i + j for j, p in enumerate(self.ycoeffs)
                   for i, c in enumerate(p.coeffs) if c]
        return max(degrees) if degrees else -1

    def coefficient(self, i: int, j: int) -> Scalar:
        """Coefficient of X^i Y^j."""
        if 0 <= j < len(self.ycoeffs):
            return self.ycoeffs[j][i]
        return Fraction(0)

    def y_coefficient(self, j: int) -> UniPoly:
        if 0 <= j < len(self.ycoeffs):
            return self.ycoeffs[j]
        return UniPoly.zero()

    def to_grid(self) -> list[list[Scalar]]:
        width = max(self.deg_x + 1, 1)
        return [[p[i] for i in range(width)] for p in self.ycoeffs]

    def terms(self) -> dict[tuple[int, int], Scalar]:
        return {(i, j): c for j, p in enumerate(self.ycoeffs)
                for i, c in enumerate(p.coeffs) if c}

    # -- ring operations ----------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.ycoeffs == other.ycoeffs

    def __hash__(self):
        return hash(self.ycoeffs)

    def __add__(self, other: "BiPoly") -> "BiPoly":
        size = max(len(self.ycoeffs), len(other.ycoeffs))
        return BiPoly(self.y_coefficient(j) + other.y_coefficient(j) for j in range(size))

    def __neg__(self) -> "BiPoly":
        return BiPoly(-p for p in self.ycoeffs)

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def __mul__(self, other) -> "BiPoly":
        if isinstance(other, UniPoly):
            return BiPoly(p * other for p in self.ycoeffs)
        if isinstance(other, (int, Fraction, GaussianRational)):
            return BiPoly(p.scale(other) for p in self.ycoeffs)
        if not isinstance(other, BiPoly):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return BiPoly()
        values = [UniPoly.zero()] * (len(self.ycoeffs) + len(other.ycoeffs) - 1)
        for j, a in enumerate(self.ycoeffs):
            if a.is_zero:
                continue
            for k, b in enumerate(other.ycoeffs):
                values[j + k] = values[j + k] + a * b
        return BiPoly(values)

    __rmul__ = __mul__

    def derivative_x(self) -> "BiPoly":
        return BiPoly(p.derivative() for p in self.ycoeffs)

    def derivative_y(self) -> "BiPoly":
        return BiPoly([p.scale(j) for j, p in enumerate(self.ycoeffs)][1:])

    def evaluate(self, x, y) -> Scalar:
        result = Fraction(0)
        for p in reversed(self.ycoeffs):
            result = result * y + p(x)
        return to_scalar(result)

    def evaluate_x(self, x) -> UniPoly:
        """Specialize X = x, returning a polynomial in Y."""
        return UniPoly(p(x) for p in self.ycoeffs)

    def conjugate(self) -> "BiPoly":
        return BiPoly(p.conjugate() for p in self.ycoeffs)

    @property
    def is_real(self) -> bool:
        return all(p.is_real for p in self.ycoeffs)

    def pseudo_remainder(self, divisor: "BiPoly") -> tuple["BiPoly", int]:
        """
        Pseudo-division in Y over Q(i)[X].

        Returns:
            (r, e) with lc_Y(divisor)^e * self = q * divisor + r and deg_Y r < deg_Y divisor
        """
        if divisor.is_zero:
            raise ZeroDivisionError("pseudo-division by zero polynomial")
        dy = divisor.deg_y
        lead = divisor.ycoeffs[-1]
        remainder = list(self.ycoeffs)
        exponent = 0
        while remainder and len(remainder) - 1 >= dy:
            shift = len(remainder) - 1 - dy
            top = remainder[-1]
            remainder = [p * lead for p in remainder]
            for i, dc in enumerate(divisor.ycoeffs):
                remainder[shift + i] = remainder[shift + i] - top * dc
            exponent += 1
            while remainder and remainder[-1].is_zero:
                remainder.pop()
        return BiPoly(remainder), exponent

    def primitive(self) -> "BiPoly":
        """Primitive Gaussian-integer associate (sign fixed by the lowest (Y, X) term)."""
        flat = [c for p in self.ycoeffs for c in p.coeffs]
        _, multiplier = normalize_scalars(flat)
        return self * multiplier

    def to_string(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for j, p in enumerate(self.ycoeffs):
            for i, c in enumerate(p.coeffs):
                if not c:
                    continue
                parts = []
                if i:
                    parts.append("X" if i == 1 else f"X^{i}")
                if j:
                    parts.append("Y" if j == 1 else f"Y^{j}")
                terms.append(_format_term(c, "*".join(parts)))
        return _join_terms(terms)

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"BiPoly({self.to_string()})"


# ============================================================================
# Modular inversion in K(X)[Y]/(h)
# ============================================================================

@dataclass(frozen=True)
class ModularInverse:
    """v = numerator / denominator with u * v = 1 modulo h."""
    numerator: BiPoly
    denominator: UniPoly


YPoly = list  # list[RationalFunction], lowest Y-degree first


def _ypoly_from_bipoly(poly: BiPoly) -> YPoly:
    return [RationalFunction(p) for p in poly.ycoeffs]


def _ypoly_trim(values: YPoly) -> YPoly:
    while values and values[-1].is_zero:
        values.pop()
    return values


def _ypoly_sub(a: YPoly, b: YPoly) -> YPoly:
    size = max(len(a), len(b))
    zero = RationalFunction(UniPoly.zero())
    values = [(a[k] if k < len(a) else zero) - (b[k] if k < len(b) else zero)
              for k in range(size)]
    return _ypoly_trim(values)


def _ypoly_mul(a: YPoly, b: YPoly) -> YPoly:
    if not a or not b:
        return []
    zero = RationalFunction(UniPoly.zero())
    values = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero:
            continue
        for j, y in enumerate(b):
            if not y.is_zero:
                values[i + j] = values[i + j] + x * y
    return _ypoly_trim(values)


def _ypoly_divmod(a: YPoly, b: YPoly) -> tuple[YPoly, YPoly]:
    remainder = list(a)
    db = len(b) - 1
    if len(remainder) - 1 < db:
        return [], _ypoly_trim(remainder)
    zero = RationalFunction(UniPoly.zero())
    quotient = [zero] * (len(remainder) - db)
    lead = b[-1]
    for k in range(len(remainder) - 1 - db, -1, -1):
        c = remainder[k + db] / lead
        quotient[k] = c
        if not c.is_zero:
            for i, bc in enumerate(b):
                remainder[k + i] = remainder[k + i] - c * bc
    return _ypoly_trim(quotient), _ypoly_trim(remainder[:db])


def _ypoly_to_bipoly(values: YPoly) -> tuple[BiPoly, UniPoly]:
    """Clear denominators: returns (numerator, common denominator)."""
    common = reduce(lambda acc, rf: acc.lcm(rf.den), values, UniPoly.one())
    rows = [rf.num * (common // rf.den) for rf in values]
    return BiPoly(rows), common


def ext_gcd_mod_h(u: BiPoly, h: BiPoly) -> ModularInverse:
    """
    Invert u modulo h in K(X)[Y] by the extended Euclidean algorithm in Y.

    Args:
        u: element to invert (any Y-degree; reduced modulo h first)
        h: modulus with deg_Y h >= 1

    Returns:
        ModularInverse with u * numerator = denominator (mod h)

    Raises:
        NotInvertibleError: if gcd(u, h) has positive Y-degree (h reducible),
            carrying the discovered factor
    """
    if h.deg_y < 1:
        raise ExactPolyError("modulus must have positive degree in Y")

    modulus = _ypoly_from_bipoly(h)
    _, reduced = _ypoly_divmod(_ypoly_from_bipoly(u), modulus)
    if not reduced:
        raise NotInvertibleError("element is zero modulo h", factor=h)

    r0, r1 = modulus, reduced
    t0, t1 = [], [RationalFunction(UniPoly.one())]
    while r1:
        q, r = _ypoly_divmod(r0, r1)
        r0, r1 = r1, r
        t0, t1 = t1, _ypoly_sub(t0, _ypoly_mul(q, t1))

    if len(r0) > 1:
        factor, _ = _ypoly_to_bipoly(r0)
        factor = factor.primitive()
        logger.warning(f"Modular inversion found a nontrivial factor of h: {factor}")
        raise NotInvertibleError(f"not invertible modulo h; common factor {factor}", factor=factor)

    unit = r0[0]
    inverse = [c / unit for c in t0]
    _, inverse = _ypoly_divmod(inverse, modulus)
    numerator, denominator = _ypoly_to_bipoly(inverse)

    # Present the denominator with constant term 1 when possible.
    anchor = denominator[0] if denominator[0] else denominator.leading_coefficient
    scale = 1 / anchor
    return ModularInverse(numerator=numerator * scale, denominator=denominator.scale(scale))
