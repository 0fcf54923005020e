"""Duistermaat-Heckman densities of complexity-two actions along a line.

On a chamber of regular values the quotient is a fixed 4-orbifold whose
reduced class moves affinely, ω_{a+tv} = ω_a + t·c, so the density is the
quadratic f(t) = ½ Q(ω_a + t·c, ω_a + t·c).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from dhlab.base import BaseCertifier
from dhlab.errors import BoundaryWall, DimensionMismatch, InputError, NonPositiveDensity, NotPositive
from dhlab.exactlin import ClassVector, IntegerSymmetricForm, Scalar, evaluate, to_rational
from dhlab.polycert import (
    Interval,
    SignKind,
    SignVerdict,
    UnivariatePolynomial,
    logconcavity_defect,
    sign_on_interval,
)


@dataclass(frozen=True)
class ReducedComponentData:
    """Quotient data on one chamber: form, reduced class at a, line class c, parameter range."""

    form: IntegerSymmetricForm
    omega_a: ClassVector
    chern: ClassVector
    interval: Interval

    def __post_init__(self):
        n = self.form.dimension
        for name, vector in (("omega_a", self.omega_a), ("chern", self.chern)):
            if len(vector) != n:
                raise DimensionMismatch(f"{name} has length {len(vector)}, form has dimension {n}")
        volume = evaluate(self.form, self.omega_a, self.omega_a)
        if volume <= 0:
            raise NotPositive(f"Q(omega_a, omega_a) = {volume} is not positive")

    @classmethod
    def from_lambda(cls, lambdas: Sequence[Scalar], r: Scalar, interval: Optional[Interval] = None) -> "ReducedComponentData":
        """Normal form of a b⁺=1 quotient: Q = diag(1, -1, ..., -1), ω_a = r·α₁, c = Σ λᵢ αᵢ.

        Args:
            lambdas: Coordinates of c in the diagonal basis
            r: Positive scale of ω_a
            interval: Parameter range, defaults to the whole line
        """
        if not lambdas:
            raise InputError("lambda must be non-empty")
        k = len(lambdas)
        form = IntegerSymmetricForm.diagonal(1, *([-1] * (k - 1)))
        omega = ClassVector((to_rational(r),) + (0,) * (k - 1))
        return cls(form, omega, ClassVector(tuple(lambdas)), interval or Interval())


@dataclass(frozen=True)
class DensityPiece:
    interval: Interval
    polynomial: UnivariatePolynomial


@dataclass(frozen=True)
class DHProfile:
    """Ordered density pieces on abutting open intervals; walls are the shared ends."""

    pieces: Tuple[DensityPiece, ...]

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if not self.pieces:
            raise InputError("a profile needs at least one piece")
        for i, (left, right) in enumerate(zip(self.pieces, self.pieces[1:])):
            if left.interval.upper is None or left.interval.upper != right.interval.lower:
                raise InputError(f"pieces {i} and {i + 1} do not abut at a wall")
        for i, piece in enumerate(self.pieces):
            value = piece.polynomial.evaluate(piece.interval.interior_point())
            if value <= 0:
                raise NonPositiveDensity(f"density of piece {i} is {value} at {piece.interval.interior_point()}")

    @property
    def walls(self) -> Tuple[Fraction, ...]:
        return tuple(piece.interval.upper for piece in self.pieces[:-1])

    @classmethod
    def single(cls, interval: Interval, polynomial: UnivariatePolynomial) -> "DHProfile":
        return cls((DensityPiece(interval, polynomial),))


class Verdict(Enum):
    LOG_CONCAVE = "LogConcave"
    STRICTLY_NON_LOG_CONCAVE = "StrictlyNonLogConcave"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class WallCheck:
    wall: Fraction
    left_derivative: Fraction
    right_derivative: Fraction
    passed: bool


@dataclass(frozen=True)
class LogConcavityReport:
    per_piece: Tuple[SignVerdict, ...]
    defects: Tuple[UnivariatePolynomial, ...]
    wall_checks: Tuple[WallCheck, ...]
    verdict: Verdict


class DensityAnalyzer(BaseCertifier):
    """Computes DH densities and certifies their log-concavity."""

    def __init__(self, jobs: int = 1):
        """Initialize the analyzer.

        Args:
            jobs: Worker threads for per-piece certification
        """
        super().__init__()
        self.jobs = max(1, jobs)

    def dh_density(self, component: ReducedComponentData) -> UnivariatePolynomial:
        """f(t) = ½(Q(c,c)t² + 2Q(c,ω_a)t + Q(ω_a,ω_a)).

        Args:
            component: Quotient data on one chamber

        Returns:
            The density as an exact polynomial in t
        """
        q = component.form
        cc = evaluate(q, component.chern, component.chern)
        cw = evaluate(q, component.chern, component.omega_a)
        ww = evaluate(q, component.omega_a, component.omega_a)
        density = UnivariatePolynomial.of(ww / 2, cw, cc / 2)
        self.logger.debug(f"Density on {component.interval}: f(t) = {density}")
        return density

    def reparameterize(self, component: ReducedComponentData, shift: Scalar) -> ReducedComponentData:
        """Move the reference point from a to a + shift·v inside the same chamber.

        The reduced class becomes ω_a + shift·c and the parameter range moves
        by -shift, so the new density is the old one composed with t ↦ t + shift.
        """
        shift = to_rational(shift)
        if not component.interval.contains(shift):
            raise InputError(f"shift {shift} leaves the chamber {component.interval}")
        return ReducedComponentData(
            form=component.form,
            omega_a=component.omega_a + component.chern.scale(shift),
            chern=component.chern,
            interval=component.interval.shift(-shift),
        )

    def profile_from_components(self, components: Sequence[ReducedComponentData]) -> DHProfile:
        """Assemble a profile from per-chamber data sharing breakpoints."""
        return DHProfile(tuple(DensityPiece(c.interval, self.dh_density(c)) for c in components))

    def wall_slope_check(self, profile: DHProfile, wall_index: int) -> WallCheck:
        """One-sided derivatives at a wall; passes when the right slope does not exceed the left.

        Args:
            profile: The density profile
            wall_index: Index of the wall, 0 for the first interior wall

        Returns:
            WallCheck with exact derivatives

        Raises:
            BoundaryWall: If the index does not name a wall with a piece on each side
        """
        if not 0 <= wall_index < len(profile.pieces) - 1:
            raise BoundaryWall(f"wall {wall_index} does not have a piece on each side")
        left_piece = profile.pieces[wall_index]
        right_piece = profile.pieces[wall_index + 1]
        wall = left_piece.interval.upper
        left = left_piece.polynomial.derivative().evaluate(wall)
        right = right_piece.polynomial.derivative().evaluate(wall)
        check = WallCheck(wall, left, right, right <= left)
        if not check.passed:
            self.logger.warning(f"Slope increases across wall {wall}: left {left}, right {right}")
        return check

    def _certify_piece(self, piece: DensityPiece) -> Tuple[UnivariatePolynomial, SignVerdict]:
        positivity = sign_on_interval(piece.polynomial, piece.interval)
        if positivity.kind is not SignKind.POSITIVE_THROUGHOUT:
            raise NonPositiveDensity(f"density {piece.polynomial} is not positive on {piece.interval}")
        defect = logconcavity_defect(piece.polynomial)
        return defect, sign_on_interval(defect, piece.interval)

    def log_concavity_verdict(self, profile: DHProfile) -> LogConcavityReport:
        """Certify log-concavity of a profile piece by piece and at every interior wall.

        Args:
            profile: The density profile

        Returns:
            LogConcavityReport; LogConcave needs every defect <= 0 and every wall
            passing, StrictlyNonLogConcave needs a defect > 0 on a whole piece
        """
        if self.jobs > 1 and len(profile.pieces) > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                certified = list(pool.map(self._certify_piece, profile.pieces))
        else:
            certified = [self._certify_piece(piece) for piece in profile.pieces]
        defects = tuple(defect for defect, _ in certified)
        per_piece = tuple(verdict for _, verdict in certified)
        wall_checks = tuple(self.wall_slope_check(profile, i) for i in range(len(profile.walls)))

        if any(v.kind is SignKind.POSITIVE_THROUGHOUT for v in per_piece):
            verdict = Verdict.STRICTLY_NON_LOG_CONCAVE
        elif all(v.is_non_positive() for v in per_piece) and all(w.passed for w in wall_checks):
            verdict = Verdict.LOG_CONCAVE
        else:
            verdict = Verdict.INCONCLUSIVE
        self.log_verdict(f"Profile with {len(profile.pieces)} piece(s)", verdict.value)
        return LogConcavityReport(per_piece, defects, wall_checks, verdict)
