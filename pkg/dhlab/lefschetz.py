"""Hard Lefschetz checks for four-manifolds and for circle bundles over them.

The total space M of the circle bundle has H*(M) free over H*(N) on 1 and
[η], with [η²] = β₂·[η] + β₄. For the class [ω] = ε[η] + [ω₀] pulled back
along the bundle, Poincaré duality leaves two maps to check:

    degree one:  H¹(N) → H³(N),  λ ↦ [2εω₀ + ε²β₂] ∪ λ
    degree two:  (φ, k) ↦ (Q(ω₀, φ) + εkβ₄·vol,  kω₀ + εφ + εkβ₂)
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, isqrt
from typing import Dict, List, Optional, Tuple

from dhlab.base import BaseCertifier
from dhlab.config import DEFAULT_EPSILON_BOUND
from dhlab.construct import CounterexampleBuilder
from dhlab.errors import (
    CertificateFailed,
    DimensionMismatch,
    InputError,
    InternalInconsistency,
    NoEpsilonFound,
    NotPositive,
)
from dhlab.exactlin import (
    ClassVector,
    IntegerSymmetricForm,
    Matrix,
    Scalar,
    evaluate,
    find_positive_orthogonal_class,
    nullspace,
    rank,
    to_rational,
)
from dhlab.polycert import Interval, SignKind, SignVerdict, UnivariatePolynomial, logconcavity_defect, sign_on_interval


@dataclass(frozen=True)
class FourManifoldRing:
    """Cohomology ring data of a closed symplectic four-manifold N.

    cup_12_3[i][j][k] is the coefficient of the k-th H³ basis class in
    a_i ∪ e_j (a_i in H¹, e_j in H²); pairing_13[i][k] = ⟨a_i ∪ g_k, [N]⟩.
    Associativity and compatibility between the tensors are not checked.
    """

    b1: int
    cup_12_3: Tuple[Tuple[Tuple[Fraction, ...], ...], ...]
    pairing_13: Tuple[Tuple[Fraction, ...], ...]
    form: IntegerSymmetricForm
    volume_normalization: Fraction = Fraction(1)

    def __post_init__(self):
        if self.b1 < 0:
            raise InputError(f"b1 = {self.b1} is negative")
        cup = tuple(tuple(tuple(to_rational(v) for v in fiber) for fiber in plane) for plane in self.cup_12_3)
        pairing = tuple(tuple(to_rational(v) for v in row) for row in self.pairing_13)
        object.__setattr__(self, "cup_12_3", cup)
        object.__setattr__(self, "pairing_13", pairing)
        object.__setattr__(self, "volume_normalization", to_rational(self.volume_normalization))
        if len(cup) != self.b1 or any(len(plane) != self.b2 for plane in cup) or any(
            len(fiber) != self.b1 for plane in cup for fiber in plane
        ):
            raise DimensionMismatch(f"cup_12_3 must have shape {self.b1} x {self.b2} x {self.b1}")
        if len(pairing) != self.b1 or any(len(row) != self.b1 for row in pairing):
            raise DimensionMismatch(f"pairing_13 must be {self.b1} x {self.b1}")
        if self.b1 and rank(pairing) != self.b1:
            raise InputError("pairing_13 is singular, Poincaré duality fails")
        if not self.form.is_nondegenerate():
            raise InputError("intersection form is degenerate")
        if self.volume_normalization == 0:
            raise NotPositive("volume_normalization must be nonzero")

    @property
    def b2(self) -> int:
        return self.form.dimension

    @classmethod
    def simply_connected(cls, form: IntegerSymmetricForm) -> "FourManifoldRing":
        return cls(0, (), (), form)


@dataclass(frozen=True)
class SixManifoldLefschetzData:
    ring: FourManifoldRing
    omega0: ClassVector
    beta2: ClassVector
    beta4: Fraction
    epsilon: Fraction

    def __post_init__(self):
        object.__setattr__(self, "beta4", to_rational(self.beta4))
        object.__setattr__(self, "epsilon", to_rational(self.epsilon))
        for name, vector in (("omega0", self.omega0), ("beta2", self.beta2)):
            if len(vector) != self.ring.b2:
                raise DimensionMismatch(f"{name} has length {len(vector)}, ring has b2 = {self.ring.b2}")
        if self.epsilon <= 0:
            raise NotPositive(f"epsilon = {self.epsilon} is not positive")
        volume = evaluate(self.ring.form, self.omega0, self.omega0)
        if volume <= 0:
            raise NotPositive(f"Q(omega0, omega0) = {volume} is not positive")


@dataclass(frozen=True)
class LefschetzMapCheck:
    injective: bool
    witness: Tuple[Fraction, ...] = ()


@dataclass(frozen=True)
class HLVerdict:
    map1_injective: bool
    map2_injective: bool
    epsilon_conditions: Tuple[bool, bool]
    overall: bool
    witnesses: Dict[str, Tuple[Fraction, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class LefschetzCounterexample:
    """A circle bundle whose total space is Hard Lefschetz while its DH density is not log-concave."""

    c: ClassVector
    epsilon: Fraction
    density: UnivariatePolynomial
    interval: Interval
    defect: UnivariatePolynomial
    certificate: SignVerdict
    hl: HLVerdict


def smallest_scale_denominator(omega_norm: Fraction, c_norm: Fraction) -> int:
    """Smallest m >= 1 with m²·Q(ω₀,ω₀) > Q(c,c), i.e. m² > ⌊Q(c,c)/Q(ω₀,ω₀)⌋."""
    if omega_norm <= 0:
        raise NotPositive(f"Q(omega0, omega0) = {omega_norm} is not positive")
    if c_norm <= 0:
        return 1
    return isqrt(floor(c_norm / omega_norm)) + 1


def lefschetz_matrix(ring: FourManifoldRing, theta: ClassVector) -> Matrix:
    """Matrix of λ ↦ θ ∪ λ from H¹ to H³; column i is the image of a_i."""
    return [
        [sum((theta[j] * ring.cup_12_3[i][j][k] for j in range(ring.b2)), Fraction(0)) for i in range(ring.b1)]
        for k in range(ring.b1)
    ]


class LefschetzChecker(BaseCertifier):
    """Exact injectivity checks for the Lefschetz maps."""

    def _injectivity(self, matrix: Matrix, columns: int) -> LefschetzMapCheck:
        if columns == 0:
            return LefschetzMapCheck(True)
        if rank(matrix, columns) == columns:
            return LefschetzMapCheck(True)
        return LefschetzMapCheck(False, tuple(nullspace(matrix, columns)[0]))

    def check_hl_four(self, ring: FourManifoldRing, omega: ClassVector) -> LefschetzMapCheck:
        """Hard Lefschetz for a four-manifold: Q(ω,ω) != 0 and L_ω: H¹ → H³ bijective.

        Args:
            ring: Cohomology ring of the four-manifold
            omega: Class in H²

        Returns:
            LefschetzMapCheck; the witness is a kernel vector of L_ω when it is singular
        """
        self.require_length(omega, ring.b2, "omega")
        if evaluate(ring.form, omega, omega) == 0:
            self.logger.info("Q(omega, omega) = 0, the top power of omega vanishes")
            return LefschetzMapCheck(False)
        check = self._injectivity(lefschetz_matrix(ring, omega), ring.b1)
        self.log_verdict(f"Hard Lefschetz on N (b1={ring.b1})", check.injective)
        return check

    def degree_one_class(self, data: SixManifoldLefschetzData) -> ClassVector:
        eps = data.epsilon
        return data.omega0.scale(2 * eps) + data.beta2.scale(eps * eps)

    def check_degree_one_map(self, data: SixManifoldLefschetzData) -> LefschetzMapCheck:
        """Injectivity of L_{[2εω₀ + ε²β₂]}: H¹(N) → H³(N).

        Using [2ω₀ + εβ₂] instead rescales the map by ε and gives the same verdict.
        """
        matrix = lefschetz_matrix(data.ring, self.degree_one_class(data))
        return self._injectivity(matrix, data.ring.b1)

    def degree_two_matrix(self, data: SixManifoldLefschetzData) -> Matrix:
        """Rows: the H⁴ component, then the [η]-component; columns: φ₁..φ_{b2}, k."""
        ring, eps = data.ring, data.epsilon
        n = ring.b2
        q_omega = ring.form.apply(data.omega0)
        top = [q_omega[j] for j in range(n)] + [eps * data.beta4 * ring.volume_normalization]
        rows = [top]
        for r in range(n):
            row = [eps if j == r else Fraction(0) for j in range(n)]
            row.append(data.omega0[r] + eps * data.beta2[r])
            rows.append(row)
        return rows

    def scalar_condition(self, data: SixManifoldLefschetzData) -> bool:
        """Q(ω₀,ω₀) != ε²β₄·vol - ε·Q(ω₀,β₂), the condition excluding kernel elements with k != 0.

        With β₂ = 0 the violating value is β₄ = +Q(ω₀,ω₀)/(ε²·vol); the
        opposite sign keeps the degree-two map injective.
        """
        form, eps = data.ring.form, data.epsilon
        lhs = evaluate(form, data.omega0, data.omega0)
        rhs = eps * eps * data.beta4 * data.ring.volume_normalization - eps * evaluate(form, data.omega0, data.beta2)
        return lhs != rhs

    def check_degree_two_map(self, data: SixManifoldLefschetzData) -> LefschetzMapCheck:
        """Injectivity of the degree-two map, by its kernel and by the scalar condition.

        Returns:
            LefschetzMapCheck with a kernel witness (φ₁..φ_{b2}, k) when not injective

        Raises:
            InternalInconsistency: If the kernel and the scalar condition disagree
        """
        columns = data.ring.b2 + 1
        check = self._injectivity(self.degree_two_matrix(data), columns)
        scalar = self.scalar_condition(data)
        if check.injective != scalar:
            self.logger.error(f"Kernel route says {check.injective}, scalar route says {scalar}")
            raise InternalInconsistency("degree-two map: kernel and scalar condition disagree")
        return check

    def check_hl_six(self, data: SixManifoldLefschetzData) -> HLVerdict:
        """Hard Lefschetz for the six-manifold; degrees 0 and 3 follow by Poincaré duality."""
        map1 = self.check_degree_one_map(data)
        map2 = self.check_degree_two_map(data)
        witnesses = {}
        if not map1.injective:
            witnesses["map1"] = map1.witness
        if not map2.injective:
            witnesses["map2"] = map2.witness
        verdict = HLVerdict(
            map1_injective=map1.injective,
            map2_injective=map2.injective,
            epsilon_conditions=(map1.injective, self.scalar_condition(data)),
            overall=map1.injective and map2.injective,
            witnesses=witnesses,
        )
        self.log_verdict(f"Hard Lefschetz on M (epsilon={data.epsilon})", verdict.overall)
        return verdict

    def find_hl_epsilon(
        self,
        ring: FourManifoldRing,
        omega0: ClassVector,
        beta2: ClassVector,
        beta4: Scalar,
        bound: int = DEFAULT_EPSILON_BOUND,
        extra: Optional[Tuple[Scalar, Scalar]] = None,
        start: int = 1,
    ) -> Fraction:
        """Largest ε = 1/m, start <= m < start + bound, for which both maps are injective.

        Args:
            ring: Cohomology ring of the base
            omega0: Symplectic class of the base
            beta2: Degree-two part of [η²]
            beta4: Degree-four part of [η²]
            bound: Number of values of m tried
            extra: (Q(ω₀,ω₀), Q(c,c)); when given, ε must also satisfy Q(ω₀,ω₀) > ε²Q(c,c)
            start: Smallest m tried

        Raises:
            NoEpsilonFound: If no m in the range works
        """
        if bound < 1:
            raise InputError(f"bound = {bound} must be a positive integer")
        if start < 1:
            raise InputError(f"start = {start} must be a positive integer")
        last = start + bound - 1
        failures: Dict[int, List[str]] = {}
        for m in range(start, last + 1):
            epsilon = Fraction(1, m)
            data = SixManifoldLefschetzData(ring, omega0, beta2, beta4, epsilon)
            failed = []
            if not self.check_degree_one_map(data).injective:
                failed.append("degree-one map singular")
            if not self.scalar_condition(data):
                failed.append("degree-two map has a kernel")
            if extra is not None:
                omega_norm, c_norm = (to_rational(v) for v in extra)
                if not omega_norm > epsilon * epsilon * c_norm:
                    failed.append("Q(omega0,omega0) > eps^2 Q(c,c) fails")
            if not failed:
                self.logger.info(f"Chose epsilon = {epsilon} after {m - start} rejected value(s)")
                return epsilon
            failures[m] = failed
            self.logger.debug(f"epsilon = 1/{m} rejected: {', '.join(failed)}")
        shown = "; ".join(f"1/{m}: {', '.join(reasons)}" for m, reasons in list(failures.items())[:5])
        raise NoEpsilonFound(
            f"no epsilon = 1/m with {start} <= m <= {last} works ({shown}{'; ...' if bound > 5 else ''})"
        )

    def lefschetz_counterexample(
        self,
        ring: FourManifoldRing,
        omega0: ClassVector,
        beta2: ClassVector,
        beta4: Scalar,
        bound: int = DEFAULT_EPSILON_BOUND,
    ) -> LefschetzCounterexample:
        """A Hard Lefschetz six-manifold with strictly non-log-concave DH density.

        The class c is taken orthogonal and positive against ω₀. The search for
        ε starts at the smallest m with m²·Q(ω₀,ω₀) > Q(c,c) and tries bound
        values from there. Both the Lefschetz verdict and the density
        certificate on (-ε, ε) are reported.

        Raises:
            InsufficientBPlus: If b⁺ of the base is below 2
            CertificateFailed: If the defect is not positive on (-ε, ε)
        """
        c = find_positive_orthogonal_class(ring.form, omega0)
        omega_norm, c_norm = evaluate(ring.form, omega0, omega0), evaluate(ring.form, c, c)
        start = smallest_scale_denominator(omega_norm, c_norm)
        epsilon = self.find_hl_epsilon(ring, omega0, beta2, beta4, bound, (omega_norm, c_norm), start)
        hl = self.check_hl_six(SixManifoldLefschetzData(ring, omega0, beta2, beta4, epsilon))

        density = CounterexampleBuilder().density_for(ring.form, omega0, c)
        interval = Interval.symmetric(epsilon)
        defect = logconcavity_defect(density)
        certificate = sign_on_interval(defect, interval)
        if certificate.kind is not SignKind.POSITIVE_THROUGHOUT:
            raise CertificateFailed(f"defect {defect} is not positive throughout {interval}")
        return LefschetzCounterexample(c, epsilon, density, interval, defect, certificate, hl)
