"""Test cases for the Hard Lefschetz checks."""

import pytest
from fractions import Fraction

from dhlab.documents import read_hl_data
from dhlab.errors import DimensionMismatch, InputError, InsufficientBPlus, NoEpsilonFound, NotPositive
from dhlab.exactlin import ClassVector, IntegerSymmetricForm, evaluate
from dhlab.lefschetz import (
    FourManifoldRing,
    LefschetzChecker,
    SixManifoldLefschetzData,
    lefschetz_matrix,
    smallest_scale_denominator,
)
from dhlab.polycert import Interval, SignKind, UnivariatePolynomial
from tests.conftest import assert_exact_certificate, assert_kernel_witness
from utils.scenario_data import ScenarioManager

SIMPLY_CONNECTED = FourManifoldRing.simply_connected(IntegerSymmetricForm.diagonal(1, 1, -1))
OMEGA0 = ClassVector.of(1, 0, 0)
ZERO = ClassVector.zero(3)
IDENTITY_2 = ((1, 0), (0, 1))


def ring_with_b1(cup, form: IntegerSymmetricForm = IntegerSymmetricForm.diagonal(1)) -> FourManifoldRing:
    """b1 = 2 over a form of the given dimension, identity H¹ × H³ pairing."""
    return FourManifoldRing(2, cup, IDENTITY_2, form)


IDENTITY_CUP = ring_with_b1((((1, 0),), ((0, 1),)))
ZERO_CUP = ring_with_b1((((0, 0),), ((0, 0),)))


def sympy_rank(matrix) -> int:
    sympy = pytest.importorskip("sympy")
    return sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in matrix]).rank()


class TestRing:
    """Validation of four-manifold cohomology data."""

    def test_simply_connected(self):
        assert SIMPLY_CONNECTED.b1 == 0
        assert SIMPLY_CONNECTED.b2 == 3

    @pytest.mark.parametrize("case", [
        {"cup": (((1, 0),),), "pairing": IDENTITY_2, "form": IntegerSymmetricForm.diagonal(1), "error": DimensionMismatch},
        {"cup": (((1, 0),), ((0, 1),)), "pairing": ((1, 0),), "form": IntegerSymmetricForm.diagonal(1),
         "error": DimensionMismatch},
        {"cup": (((1, 0),), ((0, 1),)), "pairing": ((1, 1), (1, 1)), "form": IntegerSymmetricForm.diagonal(1),
         "error": InputError},
        {"cup": (((1, 0, 0),), ((0, 1, 0),)), "pairing": IDENTITY_2, "form": IntegerSymmetricForm.diagonal(1),
         "error": DimensionMismatch},
    ])
    def test_invalid_rings(self, case):
        with pytest.raises(case["error"]):
            FourManifoldRing(2, case["cup"], case["pairing"], case["form"])

    def test_degenerate_form(self):
        with pytest.raises(InputError):
            FourManifoldRing.simply_connected(IntegerSymmetricForm.diagonal(1, 0))

    def test_lefschetz_matrix_columns(self):
        ring = ring_with_b1((((1, 2), (0, 1)), ((3, 4), (1, 0))), IntegerSymmetricForm.hyperbolic(1))
        # column i is θ ∪ a_i = Σ_j θ_j cup[i][j]
        assert lefschetz_matrix(ring, ClassVector.of(1, 2)) == [[1, 5], [4, 4]]

    @pytest.mark.parametrize("case", [
        {"epsilon": 0, "beta2": (0, 0, 0), "omega": (1, 0, 0), "error": NotPositive},
        {"epsilon": 1, "beta2": (0, 0), "omega": (1, 0, 0), "error": DimensionMismatch},
        {"epsilon": 1, "beta2": (0, 0, 0), "omega": (0, 0, 1), "error": NotPositive},
    ])
    def test_invalid_six_manifold_data(self, case):
        with pytest.raises(case["error"]):
            SixManifoldLefschetzData(SIMPLY_CONNECTED, ClassVector.of(*case["omega"]), ClassVector.of(*case["beta2"]),
                                     0, case["epsilon"])


class TestHardLefschetzFour:
    """L_ω: H¹ → H³ on the base."""

    @pytest.mark.smoke
    def test_simply_connected_is_hard_lefschetz(self, checker: LefschetzChecker):
        assert checker.check_hl_four(SIMPLY_CONNECTED, OMEGA0).injective

    def test_identity_cup_is_hard_lefschetz(self, checker: LefschetzChecker):
        assert checker.check_hl_four(IDENTITY_CUP, ClassVector.of(1)).injective

    def test_zero_cup_has_kernel(self, checker: LefschetzChecker):
        check = checker.check_hl_four(ZERO_CUP, ClassVector.of(1))
        assert not check.injective
        assert_kernel_witness(lefschetz_matrix(ZERO_CUP, ClassVector.of(1)), check.witness)

    def test_isotropic_class_fails(self, checker: LefschetzChecker):
        ring = FourManifoldRing.simply_connected(IntegerSymmetricForm.hyperbolic(1))
        check = checker.check_hl_four(ring, ClassVector.of(1, 0))
        assert not check.injective
        assert check.witness == ()

    def test_omega_length(self, checker: LefschetzChecker):
        with pytest.raises(DimensionMismatch):
            checker.check_hl_four(SIMPLY_CONNECTED, ClassVector.of(1, 0))


class TestHardLefschetzSix:
    """The degree-one and degree-two maps of the circle bundle."""

    @pytest.mark.smoke
    def test_simply_connected_bundle(self, checker: LefschetzChecker):
        verdict = checker.check_hl_six(SixManifoldLefschetzData(SIMPLY_CONNECTED, OMEGA0, ZERO, 0, 1))
        assert verdict.map1_injective and verdict.map2_injective
        assert verdict.epsilon_conditions == (True, True)
        assert verdict.overall
        assert verdict.witnesses == {}

    @pytest.mark.smoke
    def test_degree_two_violation(self, checker: LefschetzChecker):
        # β₄ = Q(ω₀,ω₀)/ε² puts (-ω₀, 1) in the kernel
        data = SixManifoldLefschetzData(SIMPLY_CONNECTED, OMEGA0, ZERO, 4, Fraction(1, 2))
        assert not checker.scalar_condition(data)
        verdict = checker.check_hl_six(data)
        assert not verdict.map2_injective and not verdict.overall
        assert verdict.epsilon_conditions == (True, False)
        assert_kernel_witness(checker.degree_two_matrix(data), verdict.witnesses["map2"])

    def test_degree_two_matrix_shape(self, checker: LefschetzChecker):
        data = SixManifoldLefschetzData(SIMPLY_CONNECTED, OMEGA0, ClassVector.of(1, 2, 3), 5, Fraction(1, 3))
        matrix = checker.degree_two_matrix(data)
        assert matrix[0] == [1, 0, 0, Fraction(5, 3)]
        assert matrix[1] == [Fraction(1, 3), 0, 0, Fraction(4, 3)]
        assert matrix[3] == [0, 0, Fraction(1, 3), 1]

    def test_scalar_condition_uses_beta2(self, checker: LefschetzChecker):
        # Q(ω₀,ω₀) = 1 = ε²β₄ - εQ(ω₀,β₂) with ε = 1, β₂ = (-1,0,0), β₄ = 0
        data = SixManifoldLefschetzData(SIMPLY_CONNECTED, OMEGA0, ClassVector.of(-1, 0, 0), 0, 1)
        assert not checker.scalar_condition(data)
        assert not checker.check_degree_two_map(data).injective

    @pytest.mark.regression
    def test_only_positive_beta4_violates(self, checker: LefschetzChecker):
        violating = SixManifoldLefschetzData(SIMPLY_CONNECTED, OMEGA0, ZERO, 4, Fraction(1, 2))
        flipped = SixManifoldLefschetzData(SIMPLY_CONNECTED, OMEGA0, ZERO, -4, Fraction(1, 2))
        assert not checker.check_degree_two_map(violating).injective
        assert checker.scalar_condition(flipped)
        assert checker.check_degree_two_map(flipped).injective

    def test_degree_one_failure(self, checker: LefschetzChecker):
        data = SixManifoldLefschetzData(ZERO_CUP, ClassVector.of(1), ClassVector.of(0), 0, 1)
        verdict = checker.check_hl_six(data)
        assert not verdict.map1_injective
        assert verdict.map2_injective
        assert "map1" in verdict.witnesses
        matrix = lefschetz_matrix(ZERO_CUP, checker.degree_one_class(data))
        assert_kernel_witness(matrix, verdict.witnesses["map1"])

    @pytest.mark.property
    def test_kernel_and_scalar_routes_agree(self, checker: LefschetzChecker, scenario_manager: ScenarioManager,
                                            random_trials: int):
        for _ in range(random_trials):
            data = scenario_manager.random_lefschetz_data()
            check = checker.check_degree_two_map(data)
            assert check.injective == checker.scalar_condition(data)

    @pytest.mark.property
    def test_forced_violations_have_kernel_witnesses(self, checker: LefschetzChecker,
                                                     scenario_manager: ScenarioManager, random_trials: int):
        for _ in range(random_trials // 4):
            base = scenario_manager.random_lefschetz_data()
            norm = evaluate(base.ring.form, base.omega0, base.omega0)
            beta4 = norm / (base.epsilon ** 2 * base.ring.volume_normalization)
            data = SixManifoldLefschetzData(base.ring, base.omega0, ClassVector.zero(base.ring.b2), beta4, base.epsilon)
            check = checker.check_degree_two_map(data)
            assert not check.injective
            assert_kernel_witness(checker.degree_two_matrix(data), check.witness)

    @pytest.mark.property
    def test_ranks_match_sympy(self, checker: LefschetzChecker, scenario_manager: ScenarioManager,
                               random_trials: int):
        pytest.importorskip("sympy")
        for _ in range(max(100, random_trials // 2)):
            data = scenario_manager.random_lefschetz_data()
            matrix = checker.degree_two_matrix(data)
            assert sympy_rank(matrix) == data.ring.b2 + (1 if checker.check_degree_two_map(data).injective else 0)
            if data.ring.b1:
                map1 = lefschetz_matrix(data.ring, checker.degree_one_class(data))
                assert (sympy_rank(map1) == data.ring.b1) is checker.check_degree_one_map(data).injective


class TestEpsilonSearch:
    """Largest ε = 1/m making the bundle Hard Lefschetz."""

    @pytest.mark.smoke
    def test_first_value_works(self, checker: LefschetzChecker):
        assert checker.find_hl_epsilon(SIMPLY_CONNECTED, OMEGA0, ZERO, 0, bound=10) == 1

    def test_tuned_beta4_skips_one(self, checker: LefschetzChecker):
        assert checker.find_hl_epsilon(SIMPLY_CONNECTED, OMEGA0, ZERO, 1, bound=10) == Fraction(1, 2)

    def test_extra_inequality(self, checker: LefschetzChecker):
        assert checker.find_hl_epsilon(SIMPLY_CONNECTED, OMEGA0, ZERO, 0, bound=10, extra=(1, 5)) == Fraction(1, 3)

    def test_search_from_start(self, checker: LefschetzChecker):
        assert checker.find_hl_epsilon(SIMPLY_CONNECTED, OMEGA0, ZERO, 0, bound=3, start=5) == Fraction(1, 5)

    def test_failure_names_the_range(self, checker: LefschetzChecker):
        with pytest.raises(NoEpsilonFound, match="5 <= m <= 6"):
            checker.find_hl_epsilon(ZERO_CUP, ClassVector.of(1), ClassVector.of(0), 0, bound=2, start=5)

    @pytest.mark.parametrize("omega_norm, c_norm, expected", [
        (1, 1, 2),
        (1, 5, 3),
        (2, 1, 1),
        (1, 0, 1),
        (82, 107072488, 1143),
    ])
    def test_smallest_scale_denominator(self, omega_norm, c_norm, expected):
        m = smallest_scale_denominator(Fraction(omega_norm), Fraction(c_norm))
        assert m == expected
        assert m * m * omega_norm > c_norm
        assert m == 1 or (m - 1) ** 2 * omega_norm <= c_norm

    def test_zero_cup_never_works(self, checker: LefschetzChecker):
        with pytest.raises(NoEpsilonFound):
            checker.find_hl_epsilon(ZERO_CUP, ClassVector.of(1), ClassVector.of(0), 0, bound=3)

    def test_bound_must_be_positive(self, checker: LefschetzChecker):
        with pytest.raises(InputError):
            checker.find_hl_epsilon(SIMPLY_CONNECTED, OMEGA0, ZERO, 0, bound=0)

    @pytest.mark.regression
    def test_bundled_document(self, checker: LefschetzChecker, scenario_manager: ScenarioManager):
        request = read_hl_data(scenario_manager.load("simply_connected_hl"))
        assert request.bound == 10 and not request.counterexample
        epsilon = checker.find_hl_epsilon(request.ring, request.omega0, request.beta2, request.beta4, request.bound)
        assert epsilon == 1
        verdict = checker.check_hl_six(
            SixManifoldLefschetzData(request.ring, request.omega0, request.beta2, request.beta4, epsilon)
        )
        assert verdict.overall


class TestLefschetzCounterexample:
    """Hard Lefschetz total space with a strictly non-log-concave density."""

    @pytest.mark.smoke
    def test_simply_connected_base(self, checker: LefschetzChecker):
        result = checker.lefschetz_counterexample(SIMPLY_CONNECTED, OMEGA0, ZERO, 0)
        assert result.c == ClassVector.of(0, 1, 0)
        assert result.epsilon == Fraction(1, 2)
        assert result.density == UnivariatePolynomial.of(Fraction(1, 2), 0, Fraction(1, 2))
        assert result.interval == Interval.symmetric(Fraction(1, 2))
        assert result.hl.overall
        assert_exact_certificate(result.certificate, SignKind.POSITIVE_THROUGHOUT, result.defect, result.interval)

    def test_bplus_one_base_is_rejected(self, checker: LefschetzChecker):
        ring = FourManifoldRing.simply_connected(IntegerSymmetricForm.diagonal(1, -1))
        with pytest.raises(InsufficientBPlus):
            checker.lefschetz_counterexample(ring, ClassVector.of(1, 0), ClassVector.zero(2), 0)

    @pytest.mark.property
    def test_random_simply_connected_bases(self, checker: LefschetzChecker, scenario_manager: ScenarioManager):
        for _ in range(30):
            case = scenario_manager.random_form_case(max_dimension=5)
            if not case.form.is_nondegenerate():
                continue
            ring = FourManifoldRing.simply_connected(case.form)
            result = checker.lefschetz_counterexample(ring, case.omega0, ClassVector.zero(ring.b2), 0)
            assert result.hl.overall
            assert evaluate(case.form, case.omega0, case.omega0) > result.epsilon ** 2 * evaluate(case.form, result.c, result.c)
            assert result.certificate.kind is SignKind.POSITIVE_THROUGHOUT

    @pytest.mark.regression
    def test_large_orthogonal_class_starts_search_past_default_bound(self, checker: LefschetzChecker):
        ring = FourManifoldRing.simply_connected(IntegerSymmetricForm.diagonal(1, 2000000))
        result = checker.lefschetz_counterexample(ring, ClassVector.of(1, 0), ClassVector.zero(2), 0)
        assert result.c == ClassVector.of(0, 1)
        assert result.epsilon == Fraction(1, 1415)
        assert result.hl.overall
        assert_exact_certificate(result.certificate, SignKind.POSITIVE_THROUGHOUT, result.defect, result.interval)

    @pytest.mark.regression
    def test_seeded_base_with_large_class(self, checker: LefschetzChecker):
        case = ScenarioManager(seed=20240601).random_form_case(max_dimension=5)
        ring = FourManifoldRing.simply_connected(case.form)
        result = checker.lefschetz_counterexample(ring, case.omega0, ClassVector.zero(ring.b2), 0)
        omega_norm = evaluate(case.form, case.omega0, case.omega0)
        c_norm = evaluate(case.form, result.c, result.c)
        assert result.epsilon == Fraction(1, smallest_scale_denominator(omega_norm, c_norm))
        assert omega_norm > result.epsilon ** 2 * c_norm
        assert result.hl.overall
