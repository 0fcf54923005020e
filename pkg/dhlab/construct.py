"""Strictly non-log-concave DH densities from four-manifolds with b⁺ >= 2.

Given an intersection form Q and an integral symplectic class ω₀, a class c
with Q(c, c) > 0 and Q(c, ω₀) = 0 is the Chern class of a circle bundle over
the four-manifold; for small ε the DH density of the induced action on
(-ε, ε) is f(t) = ½(Q(c,c)t² + Q(ω₀,ω₀)), whose defect
2h = Q(c,c)Q(ω₀,ω₀) - Q(c,c)²t² is positive there.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, isqrt

from dhlab.base import BaseCertifier
from dhlab.errors import CertificateFailed, InputError
from dhlab.exactlin import (
    ClassVector,
    IntegerSymmetricForm,
    evaluate,
    find_positive_orthogonal_class,
)
from dhlab.polycert import (
    Interval,
    SignKind,
    SignVerdict,
    UnivariatePolynomial,
    logconcavity_defect,
    sign_on_interval,
)


@dataclass(frozen=True)
class CounterexampleInput:
    form: IntegerSymmetricForm
    omega0: ClassVector
    name: str = "unnamed"

    def __post_init__(self):
        if not self.omega0.is_integral():
            raise InputError(f"{self.name}: omega0 = {self.omega0} is not an integral class")


@dataclass(frozen=True)
class CounterexampleReport:
    c: ClassVector
    epsilon: Fraction
    density: UnivariatePolynomial
    interval: Interval
    defect: UnivariatePolynomial
    certificate: SignVerdict


class CounterexampleBuilder(BaseCertifier):
    """Builds the class c, the scale ε and the certified density."""

    def choose_epsilon(self, form: IntegerSymmetricForm, omega0: ClassVector, c: ClassVector) -> Fraction:
        """Largest ε = 1/m with ε² <= Q(ω₀,ω₀) / (2·Q(c,c)).

        Args:
            form: Intersection form
            omega0: Symplectic class with Q(ω₀,ω₀) > 0
            c: Class with Q(c,c) > 0

        Returns:
            ε as a Fraction 1/m
        """
        omega_norm = evaluate(form, omega0, omega0)
        c_norm = evaluate(form, c, c)
        self.require_positive(omega_norm, "Q(omega0, omega0)")
        self.require_positive(c_norm, "Q(c, c)")
        # m² >= 2Q(c,c)/Q(ω₀,ω₀) iff m² >= its ceiling
        bound = ceil(2 * c_norm / omega_norm)
        m = isqrt(bound)
        if m * m < bound:
            m += 1
        epsilon = Fraction(1, max(m, 1))
        self.logger.info(f"Chose epsilon = {epsilon} for Q(omega0,omega0) = {omega_norm}, Q(c,c) = {c_norm}")
        return epsilon

    def density_for(self, form: IntegerSymmetricForm, omega0: ClassVector, c: ClassVector) -> UnivariatePolynomial:
        """f(t) = ½ Q(ω₀ + t·c, ω₀ + t·c)."""
        return UnivariatePolynomial.of(
            evaluate(form, omega0, omega0) / 2,
            evaluate(form, c, omega0),
            evaluate(form, c, c) / 2,
        )

    def build_counterexample(self, data: CounterexampleInput) -> CounterexampleReport:
        """Run the construction end to end.

        Args:
            data: Form, integral class and a scenario name

        Returns:
            CounterexampleReport with a PositiveThroughout defect certificate

        Raises:
            InsufficientBPlus: If b⁺(Q) < 2
            CertificateFailed: If the defect is not certified positive on (-ε, ε)
        """
        self.logger.info(f"Building counterexample '{data.name}'")
        c = find_positive_orthogonal_class(data.form, data.omega0)
        epsilon = self.choose_epsilon(data.form, data.omega0, c)
        density = self.density_for(data.form, data.omega0, c)
        if density.coefficient(1) != 0:
            raise CertificateFailed(f"density {density} has a linear term although Q(c, omega0) = 0")
        interval = Interval.symmetric(epsilon)
        defect = logconcavity_defect(density)
        certificate = sign_on_interval(defect, interval)
        if certificate.kind is not SignKind.POSITIVE_THROUGHOUT:
            self.logger.error(f"Defect {defect} on {interval} certified {certificate.kind.value}")
            raise CertificateFailed(f"defect {defect} is not positive throughout {interval}")
        report = CounterexampleReport(c, epsilon, density, interval, defect, certificate)
        self.log_verdict(f"Counterexample '{data.name}'", f"f(t) = {density} strictly non-log-concave on {interval}")
        return report

    def defect_identity_check(
        self, report: CounterexampleReport, form: IntegerSymmetricForm, omega0: ClassVector
    ) -> bool:
        """Check 2h = Q(c,c)Q(ω₀,ω₀) - Q(c,c)²t² coefficient-wise.

        The density and defect are recomputed from report.c, so a class that
        is not orthogonal to ω₀ produces a linear term and fails the check.
        """
        c_norm = evaluate(form, report.c, report.c)
        omega_norm = evaluate(form, omega0, omega0)
        density = self.density_for(form, omega0, report.c)
        expected = UnivariatePolynomial.of(c_norm * omega_norm, 0, -c_norm * c_norm)
        recomputed = logconcavity_defect(density) * 2
        holds = recomputed == expected and report.defect * 2 == expected and report.density == density
        if not holds:
            self.logger.warning(f"Defect identity fails for c = {report.c}: 2h = {recomputed}, expected {expected}")
        return holds
