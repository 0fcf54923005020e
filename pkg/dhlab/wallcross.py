"""Wall crossing for symplectic quotients of circle actions on six-manifolds.

Quotient invariants (signature, Poincaré polynomial, b₂, b⁺) are constant
on each open interval of regular values and jump at a critical level by

    Δσ = Σ_{q_i odd} (-1)^{b_i} σ(X_i)
    ΔP = Σ P(X_i)(t) · (t^{2b_i} - t^{2f_i}) / (1 - t²)

where (2f_i, 2b_i) is the Hessian type of the critical set X_i and
q_i = f_i + b_i.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from dhlab.base import BaseCertifier
from dhlab.config import QUOTIENT_DIMENSION, SIX_MANIFOLD_DIMENSION
from dhlab.errors import (
    EmptyLambda,
    IllegalStratum,
    InputError,
    InternalDivisionInexact,
    InternalInconsistency,
    NegativeBetti,
    NonIntegralBPlus,
)
from dhlab.exactlin import Scalar, to_rational
from dhlab.polycert import Interval, UnivariatePolynomial, quadratic_discriminant

ONE_MINUS_T_SQUARED = UnivariatePolynomial.of(1, 0, -1)
SPHERE_SIGNATURE = 0

# interior Hessian types allowed in a six-manifold: (2f, 2b) -> stratum dimension
INTERIOR_TYPES = {(2, 2): 2, (2, 4): 0, (4, 2): 0}


@dataclass(frozen=True)
class CriticalStratumData:
    """A critical set X inside a level: dimension, Hessian type (2f, 2b), σ(X), P(X)."""

    label: str
    dimension: int
    two_f: int
    two_b: int
    signature: int
    poincare: UnivariatePolynomial
    ambient_dimension: int = SIX_MANIFOLD_DIMENSION

    def __post_init__(self):
        if self.dimension < 0 or self.dimension % 2:
            raise InputError(f"stratum '{self.label}': dimension {self.dimension} is not even and non-negative")
        if self.two_f < 0 or self.two_b < 0 or self.two_f % 2 or self.two_b % 2:
            raise InputError(f"stratum '{self.label}': hessian ({self.two_f}, {self.two_b}) must be even and non-negative")
        if self.dimension + self.two_f + self.two_b != self.ambient_dimension:
            raise InputError(
                f"stratum '{self.label}': dimension {self.dimension} + hessian ({self.two_f}, {self.two_b}) "
                f"does not add up to {self.ambient_dimension}"
            )
        if self.poincare.evaluate(1) <= 0:
            raise InputError(f"stratum '{self.label}': Poincaré polynomial must have positive total Betti number")
        if any(c < 0 or c.denominator != 1 for c in self.poincare.coefficients):
            raise InputError(f"stratum '{self.label}': Poincaré coefficients must be non-negative integers")
        if self.poincare.degree > self.dimension:
            raise InputError(f"stratum '{self.label}': Poincaré polynomial has degree above {self.dimension}")
        if self.dimension % 4 and self.signature != 0:
            raise InputError(
                f"stratum '{self.label}': signature {self.signature} on a manifold of dimension {self.dimension}, must be 0"
            )

    @property
    def f(self) -> int:
        return self.two_f // 2

    @property
    def b(self) -> int:
        return self.two_b // 2

    @property
    def half_rank(self) -> int:
        return (self.two_f + self.two_b) // 2

    @property
    def hessian(self) -> Tuple[int, int]:
        return (self.two_f, self.two_b)


@dataclass(frozen=True)
class CriticalLevelData:
    value: Fraction
    strata: Tuple[CriticalStratumData, ...]

    def __post_init__(self):
        object.__setattr__(self, "value", to_rational(self.value))
        object.__setattr__(self, "strata", tuple(self.strata))
        if not self.strata:
            raise InputError(f"critical level {self.value} has no strata")
        labels = [s.label for s in self.strata]
        if len(set(labels)) != len(labels):
            raise InputError(f"critical level {self.value} repeats a stratum label")


@dataclass(frozen=True)
class QuotientProfile:
    """Invariants of the quotient over one open interval of regular values."""

    interval: Interval
    signature: int
    poincare: UnivariatePolynomial
    b2: int = field(init=False)
    b_plus: Fraction = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "b2", int(self.poincare.coefficient(2)))
        object.__setattr__(self, "b_plus", Fraction(self.signature + self.b2, 2))

    @property
    def b_plus_valid(self) -> bool:
        return self.b_plus.denominator == 1 and self.b_plus >= 0

    def satisfies_duality(self) -> bool:
        """P(t) = t⁴ P(1/t), i.e. the Betti numbers are palindromic in degree 4."""
        return all(
            self.poincare.coefficient(i) == self.poincare.coefficient(QUOTIENT_DIMENSION - i)
            for i in range(QUOTIENT_DIMENSION + 1)
        ) and self.poincare.degree <= QUOTIENT_DIMENSION


@dataclass(frozen=True)
class MomentProfileSpec:
    """Critical levels from minimum to maximum and the quotient just above the minimum."""

    critical_levels: Tuple[CriticalLevelData, ...]
    initial_signature: int
    initial_poincare: UnivariatePolynomial
    ambient_dimension: int = SIX_MANIFOLD_DIMENSION

    def __post_init__(self):
        object.__setattr__(self, "critical_levels", tuple(self.critical_levels))
        if len(self.critical_levels) < 2:
            raise InputError("a moment profile needs at least the minimum and maximum levels")
        values = [level.value for level in self.critical_levels]
        if any(a >= b for a, b in zip(values, values[1:])):
            raise InputError("critical values must be strictly increasing")

    @property
    def interior_levels(self) -> Tuple[CriticalLevelData, ...]:
        return self.critical_levels[1:-1]

    def chamber(self, index: int) -> Interval:
        return Interval(self.critical_levels[index].value, self.critical_levels[index + 1].value)


@dataclass(frozen=True)
class BPlusReport:
    constant: bool
    b_plus: Tuple[Fraction, ...]
    level_changes: Tuple[Tuple[Fraction, int], ...]
    profiles: Tuple[QuotientProfile, ...] = ()


@dataclass(frozen=True)
class BPlusOneDefect:
    """2(g''g - g'²) for the b⁺=1 normal form, its discriminant and S = λ₁² - λ₂² - ... - λ_k²."""

    defect2: UnivariatePolynomial
    discriminant: Fraction
    s: Fraction


class ScenarioConclusion(Enum):
    LOG_CONCAVE_BY_BPLUS_ONE = "LogConcaveByBPlusOne"
    NO_CONCLUSION = "NoConclusion"


@dataclass(frozen=True)
class ScenarioVerdict:
    profiles: Tuple[QuotientProfile, ...]
    bplus: BPlusReport
    extremal_bplus: Tuple[Optional[Fraction], Optional[Fraction]]
    conclusion: ScenarioConclusion


def stratum_bplus(stratum: CriticalStratumData) -> Fraction:
    """b⁺ = (σ + b₂)/2 of a four-dimensional critical set."""
    return Fraction(stratum.signature + int(stratum.poincare.coefficient(2)), 2)


class WallCrossingEngine(BaseCertifier):
    """Propagates quotient invariants across critical levels."""

    def __init__(self, strict_taxonomy: bool = True):
        """Initialize the engine.

        Args:
            strict_taxonomy: Reject interior strata outside the six-manifold taxonomy
        """
        super().__init__()
        self.strict_taxonomy = strict_taxonomy

    def signature_jump(self, level: CriticalLevelData) -> int:
        """Σ over strata with odd half rank of (-1)^b · σ(X)."""
        return sum((-1) ** s.b * s.signature for s in level.strata if s.half_rank % 2 == 1)

    def poincare_jump(self, level: CriticalLevelData) -> UnivariatePolynomial:
        """Σ P(X)(t)·(t^{2b} - t^{2f})/(1 - t²), divided exactly.

        Raises:
            InternalDivisionInexact: If a numerator is not divisible by 1 - t²
        """
        total = UnivariatePolynomial()
        for stratum in level.strata:
            numerator = UnivariatePolynomial.monomial(stratum.two_b) - UnivariatePolynomial.monomial(stratum.two_f)
            quotient, remainder = numerator.divmod(ONE_MINUS_T_SQUARED)
            if not remainder.is_zero():
                raise InternalDivisionInexact(f"stratum '{stratum.label}': remainder {remainder}")
            total = total + stratum.poincare * quotient
        return total

    def fiber_signature(self, sigma_base: int, sigma_fiber: int) -> int:
        """σ(P) = σ(B)·σ(F) for a coherently oriented fibre bundle."""
        return sigma_base * sigma_fiber

    def validate_stratum(self, stratum: CriticalStratumData, extremal: bool) -> None:
        """Check a stratum against the six-manifold taxonomy.

        Interior critical sets have both Hessian directions, one of rank 2:
        surfaces of type (2,2), points of type (2,4) or (4,2). Extremal sets
        have a one-sided Hessian.

        Raises:
            IllegalStratum: If strict and the stratum does not fit
        """
        if extremal:
            legal = stratum.two_f == 0 or stratum.two_b == 0
        else:
            legal = INTERIOR_TYPES.get(stratum.hessian) == stratum.dimension
        if legal:
            return
        message = (
            f"{'extremal' if extremal else 'interior'} stratum '{stratum.label}' of dimension "
            f"{stratum.dimension} with hessian {stratum.hessian}"
        )
        if self.strict_taxonomy:
            raise IllegalStratum(message)
        self.logger.warning(f"Taxonomy override: accepting {message}")

    def validate_spec(self, spec: MomentProfileSpec) -> None:
        if spec.ambient_dimension != SIX_MANIFOLD_DIMENSION:
            raise InputError(f"ambient dimension {spec.ambient_dimension} is not {SIX_MANIFOLD_DIMENSION}")
        last = len(spec.critical_levels) - 1
        for index, level in enumerate(spec.critical_levels):
            for stratum in level.strata:
                self.validate_stratum(stratum, extremal=index in (0, last))

    def initial_profile_from_minimum(self, minimum: CriticalLevelData) -> Tuple[int, UnivariatePolynomial]:
        """Quotient just above a connected minimum, from the minimum critical set.

        Isolated minimum: weighted CP² (σ = 1, P = 1 + t² + t⁴). Surface
        minimum: weighted CP¹-bundle over it (σ = σ(X)·σ(CP¹) = 0, P = P(X)(1 + t²)).
        Four-dimensional minimum: the minimum itself.
        """
        if len(minimum.strata) != 1:
            raise InputError("deriving the initial quotient needs a single minimum critical set")
        stratum = minimum.strata[0]
        if stratum.dimension == 0:
            return 1, UnivariatePolynomial.of(1, 0, 1, 0, 1)
        if stratum.dimension == 2:
            signature = self.fiber_signature(stratum.signature, SPHERE_SIGNATURE)
            return signature, stratum.poincare * UnivariatePolynomial.of(1, 0, 1)
        if stratum.dimension == 4:
            return stratum.signature, stratum.poincare
        raise IllegalStratum(f"minimum '{stratum.label}' of dimension {stratum.dimension}")

    def _make_profile(self, interval: Interval, signature: int, poincare: UnivariatePolynomial) -> QuotientProfile:
        if any(c < 0 for c in poincare.coefficients):
            raise NegativeBetti(f"Poincaré polynomial {poincare} on {interval} has a negative Betti number")
        profile = QuotientProfile(interval, signature, poincare)
        if not profile.b_plus_valid:
            raise NonIntegralBPlus(f"b+ = {profile.b_plus} on {interval} is not a non-negative integer")
        if not profile.satisfies_duality():
            self.logger.warning(f"Poincaré polynomial {poincare} on {interval} is not palindromic in degree 4")
        return profile

    def propagate(self, spec: MomentProfileSpec) -> List[QuotientProfile]:
        """Quotient invariants on every interval between consecutive critical values.

        Args:
            spec: Critical levels and the initial quotient

        Returns:
            One QuotientProfile per chamber, from the minimum upwards

        Raises:
            NegativeBetti: If a propagated Betti number goes negative
            NonIntegralBPlus: If (σ + b₂)/2 is not a non-negative integer
        """
        signature, poincare = spec.initial_signature, spec.initial_poincare
        profiles = [self._make_profile(spec.chamber(0), signature, poincare)]
        for index, level in enumerate(spec.interior_levels, start=1):
            signature += self.signature_jump(level)
            poincare = poincare + self.poincare_jump(level)
            profiles.append(self._make_profile(spec.chamber(index), signature, poincare))
            self.logger.info(
                f"Crossed level {level.value}: sigma={signature}, b2={profiles[-1].b2}, b+={profiles[-1].b_plus}"
            )
        return profiles

    def bplus_constancy_check(self, spec: MomentProfileSpec) -> BPlusReport:
        """Check that b⁺ of the quotient is the same on every chamber.

        Returns:
            BPlusReport with b⁺ per chamber and the change in σ + b₂ per interior level

        Raises:
            IllegalStratum: If a stratum violates the six-manifold taxonomy (strict mode)
        """
        self.validate_spec(spec)
        profiles = self.propagate(spec)
        changes = tuple(
            (level.value, self.signature_jump(level) + int(self.poincare_jump(level).coefficient(2)))
            for level in spec.interior_levels
        )
        b_plus = tuple(p.b_plus for p in profiles)
        report = BPlusReport(len(set(b_plus)) == 1, b_plus, changes, tuple(profiles))
        self.log_verdict("b+ constancy", report.constant)
        return report

    def scenario_verdict(self, spec: MomentProfileSpec) -> ScenarioVerdict:
        """Composed six-manifold verdict.

        Four-dimensional critical sets may only sit at the extremes; when both
        extremes are four-dimensional their b⁺ must agree with the propagated
        one. If every chamber has b⁺ = 1 the DH function is log-concave.
        """
        report = self.bplus_constancy_check(spec)
        extremal = []
        for level in (spec.critical_levels[0], spec.critical_levels[-1]):
            four_dimensional = [s for s in level.strata if s.dimension == QUOTIENT_DIMENSION]
            extremal.append(stratum_bplus(four_dimensional[0]) if four_dimensional else None)
        for value in extremal:
            if value is not None and report.constant and value != report.b_plus[0]:
                raise InputError(
                    f"extremal critical set has b+ = {value} but the quotients have b+ = {report.b_plus[0]}"
                )
        if report.constant and report.b_plus[0] == 1:
            conclusion = ScenarioConclusion.LOG_CONCAVE_BY_BPLUS_ONE
        else:
            conclusion = ScenarioConclusion.NO_CONCLUSION
        self.log_verdict("Six-manifold scenario", conclusion.value)
        return ScenarioVerdict(report.profiles, report, (extremal[0], extremal[1]), conclusion)

    def bplus_one_defect(self, lambdas: Sequence[Scalar], r: Scalar) -> BPlusOneDefect:
        """Twice the log-concavity defect of a b⁺=1 quotient along a line, with its discriminant.

        With ω_a = r·α₁ and c = Σ λᵢ αᵢ in a basis diagonalizing Q to
        diag(1, -1, ..., -1), and S = λ₁² - λ₂² - ... - λ_k²:

            2(g''g - g'²) = -S²t² - 2Sλ₁r·t - (λ₁² + ... + λ_k²)r²
            Δ = -4 S² (λ₂² + ... + λ_k²) r²

        Raises:
            EmptyLambda: If no coefficients are given
            InternalInconsistency: If S != 0 and the discriminant of the defect differs from Δ
        """
        if not lambdas:
            raise EmptyLambda("lambda must be non-empty")
        lambdas = [to_rational(v) for v in lambdas]
        r = to_rational(r)
        self.require_positive(r, "r")
        first, rest = lambdas[0], lambdas[1:]
        rest_squares = sum((v * v for v in rest), Fraction(0))
        s = first * first - rest_squares
        total_squares = first * first + rest_squares
        defect2 = UnivariatePolynomial.of(-total_squares * r * r, -2 * s * first * r, -s * s)
        discriminant = -4 * s * s * rest_squares * r * r
        if s != 0 and quadratic_discriminant(defect2) != discriminant:
            raise InternalInconsistency(f"discriminant of {defect2} differs from {discriminant}")
        return BPlusOneDefect(defect2, discriminant, s)
