"""Test cases for wall crossing of quotient invariants."""

import pytest
from fractions import Fraction
from itertools import combinations_with_replacement

from dhlab.dhcore import DensityAnalyzer, ReducedComponentData
from dhlab.documents import read_wallcross_spec
from dhlab.errors import EmptyLambda, IllegalStratum, InputError, NegativeBetti, NonIntegralBPlus, NotPositive
from dhlab.polycert import (
    Interval,
    SignKind,
    UnivariatePolynomial,
    logconcavity_defect,
    quadratic_discriminant,
    sign_on_interval,
)
from dhlab.wallcross import (
    CriticalLevelData,
    CriticalStratumData,
    MomentProfileSpec,
    QuotientProfile,
    ScenarioConclusion,
    WallCrossingEngine,
    stratum_bplus,
)
from tests.conftest import assert_numeric_sign_agrees
from utils.scenario_data import POINT, SPHERE, TORUS, ScenarioManager, legal_interior_strata, relabel

P = UnivariatePolynomial.of
T4_POINCARE = P(1, 4, 6, 4, 1)
CP2_POINCARE = P(1, 0, 1, 0, 1)


def point(label: str, two_f: int, two_b: int) -> CriticalStratumData:
    return CriticalStratumData(label, 0, two_f, two_b, 1, POINT)


def level(value, *strata: CriticalStratumData) -> CriticalLevelData:
    return CriticalLevelData(value, strata)


def spec_through(interior, signature: int, poincare: UnivariatePolynomial) -> MomentProfileSpec:
    """Spec from an isolated minimum through the given interior levels to an isolated maximum."""
    levels = [level(0, point("min", 6, 0))] + list(interior)
    levels.append(level(len(levels), point("max", 0, 6)))
    return MomentProfileSpec(tuple(levels), signature, poincare)


class TestJumps:
    """Jumps of σ and P across one critical level."""

    @pytest.mark.smoke
    @pytest.mark.parametrize("case", [
        {"stratum": point("p", 2, 4), "sigma": 1, "poincare": P(0, 0, -1)},
        {"stratum": point("p", 4, 2), "sigma": -1, "poincare": P(0, 0, 1)},
        {"stratum": CriticalStratumData("s", 2, 2, 2, 0, TORUS), "sigma": 0, "poincare": P()},
        {"stratum": CriticalStratumData("s", 2, 2, 2, 0, SPHERE), "sigma": 0, "poincare": P()},
    ])
    def test_examples(self, engine: WallCrossingEngine, case):
        crossed = level(1, case["stratum"])
        assert engine.signature_jump(crossed) == case["sigma"]
        assert engine.poincare_jump(crossed) == case["poincare"]

    def test_jumps_add_over_strata(self, engine: WallCrossingEngine):
        crossed = level(1, point("a", 2, 4), point("b", 2, 4), point("c", 4, 2))
        assert engine.signature_jump(crossed) == 1
        assert engine.poincare_jump(crossed) == P(0, 0, -1)

    def test_even_half_rank_does_not_move_signature(self, engine: WallCrossingEngine):
        four_fold = CriticalStratumData("x", 4, 2, 2, 5, CP2_POINCARE, ambient_dimension=8)
        crossed = level(1, four_fold)
        assert engine.signature_jump(crossed) == 0

    @pytest.mark.regression
    @pytest.mark.parametrize("size", [1, 2, 3, 4, 5])
    def test_sigma_plus_b2_is_conserved(self, engine: WallCrossingEngine, size):
        for combination in combinations_with_replacement(legal_interior_strata(), size):
            crossed = level(1, *(relabel(s, f"x{i}") for i, s in enumerate(combination)))
            change = engine.signature_jump(crossed) + engine.poincare_jump(crossed).coefficient(2)
            assert change == 0, f"σ + b₂ moved by {change} across {[s.hessian for s in combination]}"
            report = engine.bplus_constancy_check(spec_through([crossed], -3, P(1, 0, 5, 0, 1)))
            assert report.constant and report.b_plus == (1, 1)

    @pytest.mark.property
    def test_division_is_exact_on_every_hessian(self, engine: WallCrossingEngine):
        for two_f in range(0, 7, 2):
            for two_b in range(0, 7 - two_f, 2):
                dimension = 6 - two_f - two_b
                stratum = CriticalStratumData("x", dimension, two_f, two_b, 0, P(*([1] * (dimension + 1))))
                jump = engine.poincare_jump(level(0, stratum))
                numerator = UnivariatePolynomial.monomial(two_b) - UnivariatePolynomial.monomial(two_f)
                assert jump * P(1, 0, -1) == stratum.poincare * numerator


class TestStrata:
    """Validation of critical sets and levels."""

    @pytest.mark.parametrize("kwargs", [
        {"dimension": 1, "two_f": 2, "two_b": 3},
        {"dimension": 2, "two_f": 2, "two_b": 4},
        {"dimension": 2, "two_f": 2, "two_b": 2, "poincare": P()},
        {"dimension": 2, "two_f": 2, "two_b": 2, "poincare": P(1, -1, 1)},
        {"dimension": 2, "two_f": 2, "two_b": 2, "poincare": P(1, Fraction(1, 2), 1)},
        {"dimension": 0, "two_f": 2, "two_b": 4, "poincare": P(1, 0, 1)},
        {"dimension": 2, "two_f": 2, "two_b": 2, "signature": 7, "poincare": SPHERE},
        {"dimension": 2, "two_f": 4, "two_b": 0, "signature": -1, "poincare": TORUS},
    ])
    def test_invalid_strata(self, kwargs):
        values = {"label": "x", "signature": 0, "poincare": P(1)}
        values.update(kwargs)
        with pytest.raises(InputError):
            CriticalStratumData(**values)

    def test_level_needs_distinct_labels(self):
        with pytest.raises(InputError):
            level(1, point("p", 2, 4), point("p", 4, 2))

    def test_level_needs_strata(self):
        with pytest.raises(InputError):
            CriticalLevelData(1, ())

    def test_spec_needs_increasing_levels(self):
        with pytest.raises(InputError):
            MomentProfileSpec((level(1, point("min", 6, 0)), level(1, point("max", 0, 6))), 1, CP2_POINCARE)
        with pytest.raises(InputError):
            MomentProfileSpec((level(0, point("min", 6, 0)),), 1, CP2_POINCARE)

    def test_quotient_profile_derived_fields(self):
        profile = QuotientProfile(Interval(0, 1), 0, T4_POINCARE)
        assert (profile.b2, profile.b_plus) == (6, 3)
        assert profile.b_plus_valid and profile.satisfies_duality()
        assert not QuotientProfile(Interval(0, 1), 1, P(1, 0, 1)).satisfies_duality()

    def test_stratum_bplus(self):
        assert stratum_bplus(CriticalStratumData("t4", 4, 0, 2, 0, T4_POINCARE)) == 3
        assert stratum_bplus(CriticalStratumData("cp2", 4, 2, 0, 1, CP2_POINCARE)) == 1


class TestPropagate:
    """Quotient invariants chamber by chamber."""

    @pytest.mark.smoke
    def test_t4_profile_without_interior_levels(self, engine: WallCrossingEngine):
        spec = MomentProfileSpec(
            (level(0, CriticalStratumData("bottom", 4, 0, 2, 0, T4_POINCARE)),
             level(1, CriticalStratumData("top", 4, 2, 0, 0, T4_POINCARE))),
            0, T4_POINCARE,
        )
        profiles = engine.propagate(spec)
        assert len(profiles) == 1
        assert profiles[0].b_plus == 3
        assert profiles[0].interval == Interval(0, 1)

    @pytest.mark.smoke
    def test_two_points_keep_bplus(self, engine: WallCrossingEngine):
        spec = spec_through([level(1, point("p", 2, 4)), level(2, point("q", 4, 2))], 1, P(1, 0, 1))
        profiles = engine.propagate(spec)
        assert [p.signature for p in profiles] == [1, 2, 1]
        assert [p.b2 for p in profiles] == [1, 0, 1]
        assert [p.b_plus for p in profiles] == [1, 1, 1]

    def test_surface_leaves_profile_unchanged(self, engine: WallCrossingEngine):
        spec = spec_through([level(1, CriticalStratumData("s", 2, 2, 2, 0, TORUS))], 1, CP2_POINCARE)
        first, second = engine.propagate(spec)
        assert (first.signature, first.poincare) == (second.signature, second.poincare)

    def test_negative_betti(self, engine: WallCrossingEngine):
        with pytest.raises(NegativeBetti):
            engine.propagate(spec_through([level(1, point("p", 2, 4))], 0, P(1, 0, 0, 0, 1)))

    def test_non_integral_bplus(self, engine: WallCrossingEngine):
        with pytest.raises(NonIntegralBPlus):
            engine.propagate(spec_through([], 1, P(1, 0, 0, 0, 1)))

    @pytest.mark.property
    def test_random_legal_levels_keep_bplus(self, engine: WallCrossingEngine, scenario_manager: ScenarioManager,
                                            random_trials: int):
        for _ in range(random_trials // 4):
            interior = [scenario_manager.random_interior_level(k + 1, max_strata=2) for k in range(3)]
            signature, poincare = 1, CP2_POINCARE
            try:
                report = engine.bplus_constancy_check(spec_through(interior, signature, poincare))
            except NegativeBetti:
                continue
            assert report.constant
            assert all(change == 0 for _, change in report.level_changes)


class TestBPlusConstancy:
    """Constancy of b⁺ and the six-manifold taxonomy."""

    def test_empty_interior_is_constant(self, engine: WallCrossingEngine):
        report = engine.bplus_constancy_check(spec_through([], 1, CP2_POINCARE))
        assert report.constant
        assert report.b_plus == (1,)
        assert report.level_changes == ()

    @pytest.mark.parametrize("stratum", [
        CriticalStratumData("four", 4, 0, 2, 0, T4_POINCARE),
        CriticalStratumData("bad_surface", 2, 0, 4, 0, SPHERE),
        point("one_sided", 0, 6),
    ])
    def test_illegal_interior_stratum(self, engine: WallCrossingEngine, stratum):
        with pytest.raises(IllegalStratum):
            engine.bplus_constancy_check(spec_through([level(1, stratum)], 1, CP2_POINCARE))

    def test_illegal_extremal_stratum(self, engine: WallCrossingEngine):
        spec = MomentProfileSpec((level(0, point("min", 2, 4)), level(1, point("max", 0, 6))), 1, CP2_POINCARE)
        with pytest.raises(IllegalStratum):
            engine.bplus_constancy_check(spec)

    def test_relaxed_taxonomy_warns_and_continues(self):
        engine = WallCrossingEngine(strict_taxonomy=False)
        report = engine.bplus_constancy_check(spec_through([level(1, point("one_sided", 0, 6))], 1, CP2_POINCARE))
        assert report.b_plus == (1, 0)
        assert not report.constant

    @pytest.mark.parametrize("case", [
        {"base": 1, "fiber": 0, "expected": 0},
        {"base": 1, "fiber": 1, "expected": 1},
        {"base": 0, "fiber": 1, "expected": 0},
    ])
    def test_fiber_signature(self, engine: WallCrossingEngine, case):
        assert engine.fiber_signature(case["base"], case["fiber"]) == case["expected"]


class TestInitialProfile:
    """The first quotient derived from the minimum."""

    @pytest.mark.parametrize("case", [
        {"stratum": point("min", 6, 0), "expected": (1, CP2_POINCARE)},
        {"stratum": CriticalStratumData("min", 2, 4, 0, 0, SPHERE), "expected": (0, P(1, 0, 2, 0, 1))},
        {"stratum": CriticalStratumData("min", 2, 4, 0, 0, TORUS), "expected": (0, P(1, 2, 2, 2, 1))},
        {"stratum": CriticalStratumData("min", 4, 2, 0, 0, T4_POINCARE), "expected": (0, T4_POINCARE)},
    ])
    def test_examples(self, engine: WallCrossingEngine, case):
        assert engine.initial_profile_from_minimum(level(0, case["stratum"])) == case["expected"]

    @pytest.mark.regression
    def test_surface_minimum_has_zero_signature(self, engine: WallCrossingEngine):
        with pytest.raises(InputError, match="must be 0"):
            CriticalStratumData("min", 2, 4, 0, 7, SPHERE)
        signature, _ = engine.initial_profile_from_minimum(level(0, CriticalStratumData("min", 2, 4, 0, 0, SPHERE)))
        assert signature == 0

    def test_disconnected_minimum(self, engine: WallCrossingEngine):
        with pytest.raises(InputError):
            engine.initial_profile_from_minimum(level(0, point("a", 6, 0), point("b", 6, 0)))

    def test_scenario_without_initial_block(self, engine: WallCrossingEngine, scenario_manager: ScenarioManager):
        spec = read_wallcross_spec(scenario_manager.load("bplus_one_walls"), engine)
        assert (spec.initial_signature, spec.initial_poincare) == (1, CP2_POINCARE)


class TestScenarioVerdict:
    """Composed six-manifold verdicts."""

    @pytest.mark.smoke
    def test_bplus_one_walls(self, engine: WallCrossingEngine, scenario_manager: ScenarioManager):
        spec = read_wallcross_spec(scenario_manager.load("bplus_one_walls"), engine)
        verdict = engine.scenario_verdict(spec)
        assert [p.signature for p in verdict.profiles] == [1, 0, 0, 1]
        assert [p.b_plus for p in verdict.profiles] == [1, 1, 1, 1]
        assert verdict.extremal_bplus == (None, None)
        assert verdict.conclusion is ScenarioConclusion.LOG_CONCAVE_BY_BPLUS_ONE

    def test_four_dimensional_extremes(self, engine: WallCrossingEngine):
        spec = MomentProfileSpec(
            (level(0, CriticalStratumData("bottom", 4, 0, 2, 0, T4_POINCARE)),
             level(1, CriticalStratumData("top", 4, 2, 0, 0, T4_POINCARE))),
            0, T4_POINCARE,
        )
        verdict = engine.scenario_verdict(spec)
        assert verdict.extremal_bplus == (3, 3)
        assert verdict.conclusion is ScenarioConclusion.NO_CONCLUSION

    def test_extremal_bplus_mismatch(self, engine: WallCrossingEngine):
        spec = MomentProfileSpec(
            (level(0, CriticalStratumData("bottom", 4, 0, 2, 0, T4_POINCARE)),
             level(1, CriticalStratumData("top", 4, 2, 0, 1, CP2_POINCARE))),
            0, T4_POINCARE,
        )
        with pytest.raises(InputError):
            engine.scenario_verdict(spec)


class TestBPlusOneDefect:
    """The defect of a b⁺=1 quotient along a line."""

    @pytest.mark.smoke
    @pytest.mark.parametrize("case", [
        {"lambdas": [1], "r": 1, "defect2": P(-1, -2, -1), "discriminant": 0, "s": 1},
        {"lambdas": [0, 0], "r": 1, "defect2": P(), "discriminant": 0, "s": 0},
        {"lambdas": [1, 1], "r": 2, "defect2": P(-8), "discriminant": 0, "s": 0},
        {"lambdas": [2, 1], "r": 1, "defect2": P(-5, -12, -9), "discriminant": -36, "s": 3},
    ])
    def test_examples(self, engine: WallCrossingEngine, case):
        defect = engine.bplus_one_defect(case["lambdas"], case["r"])
        assert defect.defect2 == case["defect2"]
        assert defect.discriminant == case["discriminant"]
        assert defect.s == case["s"]

    def test_errors(self, engine: WallCrossingEngine):
        with pytest.raises(EmptyLambda):
            engine.bplus_one_defect([], 1)
        with pytest.raises(NotPositive):
            engine.bplus_one_defect([1], 0)

    @pytest.mark.property
    @pytest.mark.slow
    def test_random_defects_are_non_positive(self, engine: WallCrossingEngine, scenario_manager: ScenarioManager,
                                             random_trials: int):
        for _ in range(max(500, random_trials)):
            case = scenario_manager.random_lambda_case()
            defect = engine.bplus_one_defect(case.lambdas, case.r)
            verdict = sign_on_interval(defect.defect2, Interval())
            assert verdict.is_non_positive(), f"λ={case.lambdas}, r={case.r}: {verdict.kind.value}"
            assert defect.discriminant <= 0
            if defect.s != 0:
                assert quadratic_discriminant(defect.defect2) == defect.discriminant

    @pytest.mark.property
    def test_certificates_match_sampling(self, engine: WallCrossingEngine, scenario_manager: ScenarioManager):
        for _ in range(50):
            case = scenario_manager.random_lambda_case()
            defect = engine.bplus_one_defect(case.lambdas, case.r)
            verdict = sign_on_interval(defect.defect2, Interval())
            assert_numeric_sign_agrees(verdict, defect.defect2, -10.0, 10.0)

    def test_matches_density_of_normal_form(self, engine: WallCrossingEngine, analyzer: DensityAnalyzer):
        component = ReducedComponentData.from_lambda([3, 1, -2], Fraction(1, 2))
        density = analyzer.dh_density(component)
        assert 2 * logconcavity_defect(density) == engine.bplus_one_defect([3, 1, -2], Fraction(1, 2)).defect2
        assert sign_on_interval(logconcavity_defect(density), Interval()).kind is not SignKind.MIXED
