"""Exact univariate polynomials over the rationals and sign certificates on open intervals.

Roots are counted with sympy's Sturm machinery on the square-free part over
QQ; the roots inside the interval are isolated by bisection, and the
polynomial is evaluated exactly at one rational point in every gap between
them. Fraction stays the coefficient type at the module boundary.
"""

import logging
import sympy
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import gcd, lcm
from typing import List, Optional, Tuple, Union

from dhlab.errors import InputError, NotQuadratic
from dhlab.exactlin import Scalar, to_rational

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UnivariatePolynomial:
    """Dense rational coefficients, index = degree; the zero polynomial has no coefficients."""

    coefficients: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        coefficients = [to_rational(c) for c in self.coefficients]
        while coefficients and coefficients[-1] == 0:
            coefficients.pop()
        object.__setattr__(self, "coefficients", tuple(coefficients))

    @classmethod
    def of(cls, *coefficients: Scalar) -> "UnivariatePolynomial":
        return cls(tuple(coefficients))

    @classmethod
    def constant(cls, value: Scalar) -> "UnivariatePolynomial":
        return cls((value,))

    @classmethod
    def monomial(cls, degree: int, coefficient: Scalar = 1) -> "UnivariatePolynomial":
        return cls((0,) * degree + (coefficient,))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> Fraction:
        return self.coefficients[-1] if self.coefficients else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coefficients

    def coefficient(self, degree: int) -> Fraction:
        if 0 <= degree < len(self.coefficients):
            return self.coefficients[degree]
        return Fraction(0)

    def add(self, other: Union["UnivariatePolynomial", Scalar]) -> "UnivariatePolynomial":
        other = _as_polynomial(other)
        size = max(len(self.coefficients), len(other.coefficients))
        return UnivariatePolynomial(tuple(self.coefficient(i) + other.coefficient(i) for i in range(size)))

    def multiply(self, other: Union["UnivariatePolynomial", Scalar]) -> "UnivariatePolynomial":
        other = _as_polynomial(other)
        if self.is_zero() or other.is_zero():
            return UnivariatePolynomial()
        product = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if a == 0:
                continue
            for j, b in enumerate(other.coefficients):
                product[i + j] += a * b
        return UnivariatePolynomial(tuple(product))

    def derivative(self) -> "UnivariatePolynomial":
        return UnivariatePolynomial(tuple(i * c for i, c in enumerate(self.coefficients))[1:])

    def evaluate(self, point: Scalar) -> Fraction:
        point = to_rational(point)
        value = Fraction(0)
        for c in reversed(self.coefficients):
            value = value * point + c
        return value

    def compose_affine(self, a: Scalar, b: Scalar) -> "UnivariatePolynomial":
        """Return p(a·t + b)."""
        inner = UnivariatePolynomial.of(b, a)
        result = UnivariatePolynomial()
        for c in reversed(self.coefficients):
            result = result.multiply(inner).add(c)
        return result

    def divmod(self, divisor: "UnivariatePolynomial") -> Tuple["UnivariatePolynomial", "UnivariatePolynomial"]:
        """Exact polynomial long division over the rationals."""
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        remainder = list(self.coefficients)
        quotient = [Fraction(0)] * max(len(remainder) - divisor.degree, 1)
        while len(remainder) - 1 >= divisor.degree and any(remainder):
            shift = len(remainder) - 1 - divisor.degree
            factor = remainder[-1] / divisor.leading
            quotient[shift] = factor
            for i, c in enumerate(divisor.coefficients):
                remainder[shift + i] -= factor * c
            remainder.pop()
            while remainder and remainder[-1] == 0:
                remainder.pop()
        return UnivariatePolynomial(tuple(quotient)), UnivariatePolynomial(tuple(remainder))

    def primitive(self) -> "UnivariatePolynomial":
        """Positive rescaling to coprime integer coefficients (signs are kept)."""
        if self.is_zero():
            return self
        scale = lcm(*(c.denominator for c in self.coefficients))
        integers = [int(c * scale) for c in self.coefficients]
        content = 0
        for value in integers:
            content = gcd(content, value)
        return UnivariatePolynomial(tuple(Fraction(v, content) for v in integers))

    def monic(self) -> "UnivariatePolynomial":
        if self.is_zero():
            return self
        return self.multiply(1 / self.leading)

    def __add__(self, other):
        return self.add(other)

    __radd__ = __add__

    def __sub__(self, other):
        return self.add(_as_polynomial(other).multiply(-1))

    def __rsub__(self, other):
        return _as_polynomial(other).add(self.multiply(-1))

    def __neg__(self):
        return self.multiply(-1)

    def __mul__(self, other):
        return self.multiply(other)

    __rmul__ = __mul__

    def __call__(self, point: Scalar) -> Fraction:
        return self.evaluate(point)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for degree in range(self.degree, -1, -1):
            c = self.coefficients[degree]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            magnitude = abs(c)
            if degree == 0:
                body = str(magnitude)
            else:
                power = "t" if degree == 1 else f"t^{degree}"
                body = power if magnitude == 1 else f"{magnitude}*{power}"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


def _as_polynomial(value: Union[UnivariatePolynomial, Scalar]) -> UnivariatePolynomial:
    if isinstance(value, UnivariatePolynomial):
        return value
    return UnivariatePolynomial.constant(value)


_T = sympy.Symbol("t")


def to_sympy(p: UnivariatePolynomial) -> sympy.Poly:
    """The same polynomial as a sympy Poly over QQ."""
    coefficients = [sympy.Rational(c.numerator, c.denominator) for c in reversed(p.coefficients)]
    return sympy.Poly(coefficients or [0], _T, domain=sympy.QQ)


def from_sympy(poly: sympy.Poly) -> UnivariatePolynomial:
    return UnivariatePolynomial(tuple(Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())))


def _rational(value: Optional[Fraction]) -> Optional[sympy.Rational]:
    return None if value is None else sympy.Rational(value.numerator, value.denominator)


def polynomial_gcd(p: UnivariatePolynomial, q: UnivariatePolynomial) -> UnivariatePolynomial:
    """Monic greatest common divisor (zero when both inputs are zero)."""
    return from_sympy(to_sympy(p).gcd(to_sympy(q))).monic()


def squarefree_part(p: UnivariatePolynomial) -> UnivariatePolynomial:
    """p / gcd(p, p'), made primitive with the leading sign of p; same real roots as p, all simple."""
    if p.degree <= 0:
        return p
    core = from_sympy(to_sympy(p).sqf_part()).primitive()
    return core if _sign(core.leading) == _sign(p.leading) else -core


@dataclass(frozen=True)
class Interval:
    """Open interval; None stands for -∞ (lower) or +∞ (upper)."""

    lower: Optional[Fraction] = None
    upper: Optional[Fraction] = None

    def __post_init__(self):
        lower = None if self.lower is None else to_rational(self.lower)
        upper = None if self.upper is None else to_rational(self.upper)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower is not None and upper is not None and not lower < upper:
            raise InputError(f"interval lower end {lower} is not below upper end {upper}")

    @classmethod
    def symmetric(cls, radius: Scalar) -> "Interval":
        radius = to_rational(radius)
        return cls(-radius, radius)

    def is_bounded(self) -> bool:
        return self.lower is not None and self.upper is not None

    def contains(self, point: Scalar) -> bool:
        point = to_rational(point)
        return (self.lower is None or self.lower < point) and (self.upper is None or point < self.upper)

    def interior_point(self) -> Fraction:
        """A canonical rational point inside: the midpoint, or one unit in from a finite end."""
        if self.is_bounded():
            return (self.lower + self.upper) / 2
        if self.lower is not None:
            return self.lower + 1
        if self.upper is not None:
            return self.upper - 1
        return Fraction(0)

    def shift(self, offset: Scalar) -> "Interval":
        offset = to_rational(offset)
        return Interval(
            None if self.lower is None else self.lower + offset,
            None if self.upper is None else self.upper + offset,
        )

    def __str__(self) -> str:
        lower = "-inf" if self.lower is None else str(self.lower)
        upper = "+inf" if self.upper is None else str(self.upper)
        return f"({lower}, {upper})"


class SignKind(Enum):
    POSITIVE_THROUGHOUT = "PositiveThroughout"
    NEGATIVE_THROUGHOUT = "NegativeThroughout"
    IDENTICALLY_ZERO = "IdenticallyZero"
    NON_NEGATIVE = "NonNegative"
    NON_POSITIVE = "NonPositive"
    MIXED = "Mixed"


@dataclass(frozen=True)
class SignVerdict:
    """Sign of a polynomial on an open interval, with exact witnesses.

    Witnesses are (point, value) pairs: one interior sample for strict
    verdicts, the rational zeros found for weak verdicts, and one sample of
    each strict sign for Mixed. Irrational roots are reported through
    root_brackets, each an open interval holding exactly one distinct root.
    """

    kind: SignKind
    witnesses: Tuple[Tuple[Fraction, Fraction], ...] = ()
    root_brackets: Tuple[Tuple[Fraction, Fraction], ...] = field(default=())

    def is_non_positive(self) -> bool:
        return self.kind in (SignKind.NON_POSITIVE, SignKind.NEGATIVE_THROUGHOUT, SignKind.IDENTICALLY_ZERO)

    def is_non_negative(self) -> bool:
        return self.kind in (SignKind.NON_NEGATIVE, SignKind.POSITIVE_THROUGHOUT, SignKind.IDENTICALLY_ZERO)

    def __str__(self) -> str:
        return self.kind.value


def logconcavity_defect(f: UnivariatePolynomial) -> UnivariatePolynomial:
    """h = f''·f - (f')²; ln f is concave where h <= 0 and strictly convex where h > 0."""
    first = f.derivative()
    return f.derivative().derivative() * f - first * first


def quadratic_discriminant(p: UnivariatePolynomial) -> Fraction:
    """b² - 4ac for p = a·t² + b·t + c.

    Raises:
        NotQuadratic: If p does not have degree exactly 2
    """
    if p.degree != 2:
        raise NotQuadratic(f"polynomial {p} has degree {p.degree}")
    c, b, a = p.coefficients
    return b * b - 4 * a * c


def sturm_sequence(p: UnivariatePolynomial) -> List[UnivariatePolynomial]:
    """Sturm sequence of the square-free part of p, each term made primitive."""
    if p.degree <= 0:
        return [p.primitive()]
    return [from_sympy(term).primitive() for term in to_sympy(p).sturm()]


def _sign(value: Fraction) -> int:
    return (value > 0) - (value < 0)


def _roots_strictly_between(poly: sympy.Poly, lower: Optional[Fraction], upper: Optional[Fraction]) -> int:
    # sympy counts distinct roots in the closed interval; roots at finite ends come off
    count = int(poly.count_roots(_rational(lower), _rational(upper)))
    for end in (lower, upper):
        if end is not None and poly.eval(_rational(end)) == 0:
            count -= 1
    return count


def count_roots(p: UnivariatePolynomial, interval: Interval) -> int:
    """Number of distinct real roots of p in the open interval.

    Args:
        p: Nonzero polynomial
        interval: Open interval

    Returns:
        The number of distinct roots strictly inside the interval
    """
    if p.is_zero():
        raise InputError("the zero polynomial has infinitely many roots")
    core = squarefree_part(p)
    if core.degree <= 0:
        return 0
    return _roots_strictly_between(to_sympy(core), interval.lower, interval.upper)


def _cauchy_bound(p: UnivariatePolynomial) -> Fraction:
    # every real root r satisfies |r| < bound
    return 1 + max(abs(c / p.leading) for c in p.coefficients[:-1])


class _RootIsolator:
    """Isolate the distinct roots of a square-free polynomial inside (lo, hi)."""

    def __init__(self, core: UnivariatePolynomial, lo: Fraction, hi: Fraction):
        self.core = core
        self.poly = to_sympy(core)
        self.lo = lo
        self.hi = hi

    def count(self, a: Fraction, b: Fraction) -> int:
        return _roots_strictly_between(self.poly, a, b)

    def isolate(self, a: Fraction, b: Fraction) -> List[Tuple[Fraction, Fraction]]:
        """Containers (x, x) for exact roots, (a', b') brackets holding one root otherwise."""
        n = self.count(a, b)
        if n == 0:
            return []
        if n == 1:
            return [self._tighten(a, b)]
        m = (a + b) / 2
        middle = [(m, m)] if self.core.evaluate(m) == 0 else []
        return self.isolate(a, m) + middle + self.isolate(m, b)

    def _tighten(self, a: Fraction, b: Fraction) -> Tuple[Fraction, Fraction]:
        # move bracket ends off roots and off the interval ends
        while self.core.evaluate(a) == 0 or self.core.evaluate(b) == 0 or a == self.lo or b == self.hi:
            m = (a + b) / 2
            if self.core.evaluate(m) == 0:
                return (m, m)
            if self.count(a, m) == 1:
                b = m
            else:
                a = m
        return (a, b)


def sign_on_interval(p: UnivariatePolynomial, interval: Interval) -> SignVerdict:
    """Certify the sign of p on an open interval exactly.

    Args:
        p: Polynomial to certify
        interval: Open interval (ends may be infinite)

    Returns:
        SignVerdict with exact witnesses
    """
    if p.is_zero():
        return SignVerdict(SignKind.IDENTICALLY_ZERO)
    core = squarefree_part(p)
    if core.degree <= 0 or count_roots(p, interval) == 0:
        point = interval.interior_point()
        value = p.evaluate(point)
        kind = SignKind.POSITIVE_THROUGHOUT if value > 0 else SignKind.NEGATIVE_THROUGHOUT
        return SignVerdict(kind, ((point, value),))

    bound = _cauchy_bound(core)
    lo = interval.lower if interval.lower is not None else -bound
    hi = interval.upper if interval.upper is not None else bound
    isolator = _RootIsolator(core, lo, hi)
    containers = isolator.isolate(lo, hi)

    edges = [lo] + [edge for container in containers for edge in container] + [hi]
    samples = []
    for k in range(len(containers) + 1):
        left, right = edges[2 * k], edges[2 * k + 1]
        samples.append(left if left == right else (left + right) / 2)
    values = [(point, p.evaluate(point)) for point in samples]
    exact_roots = tuple((a, Fraction(0)) for a, b in containers if a == b)
    brackets = tuple((a, b) for a, b in containers if a != b)

    positives = [w for w in values if w[1] > 0]
    negatives = [w for w in values if w[1] < 0]
    if positives and negatives:
        verdict = SignVerdict(SignKind.MIXED, (negatives[0], positives[0]) if negatives[0][0] < positives[0][0]
                              else (positives[0], negatives[0]), brackets)
    elif positives:
        verdict = SignVerdict(SignKind.NON_NEGATIVE, exact_roots + (positives[0],), brackets)
    else:
        verdict = SignVerdict(SignKind.NON_POSITIVE, exact_roots + (negatives[0],), brackets)
    logger.debug(f"sign of {p} on {interval}: {verdict.kind.value} ({len(containers)} roots)")
    return verdict
