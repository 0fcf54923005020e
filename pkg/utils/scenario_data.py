"""Scenario data management: bundled documents and seeded random instances."""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from dhlab.documents import InputDocument, load_document
from dhlab.exactlin import ClassVector, IntegerSymmetricForm, clear_denominators, diagonalize, evaluate, inertia
from dhlab.lefschetz import FourManifoldRing, SixManifoldLefschetzData
from dhlab.polycert import UnivariatePolynomial
from dhlab.wallcross import CriticalLevelData, CriticalStratumData

PROJECT_ROOT = Path(__file__).resolve().parent.parent
SCENARIO_DIR = PROJECT_ROOT / "scenarios"

SPHERE = UnivariatePolynomial.of(1, 0, 1)
TORUS = UnivariatePolynomial.of(1, 2, 1)
POINT = UnivariatePolynomial.of(1)


@dataclass
class FormCase:
    """An intersection form with an integral class of positive square."""
    form: IntegerSymmetricForm
    omega0: ClassVector


@dataclass
class LambdaCase:
    """Coordinates of c in the b⁺=1 normal form and the scale r of ω_a."""
    lambdas: List[Fraction]
    r: Fraction


def legal_interior_strata() -> List[CriticalStratumData]:
    """The interior critical sets a six-manifold allows, one of each kind."""
    return [
        CriticalStratumData("sphere", 2, 2, 2, 0, SPHERE),
        CriticalStratumData("torus", 2, 2, 2, 0, TORUS),
        CriticalStratumData("point_24", 0, 2, 4, 1, POINT),
        CriticalStratumData("point_42", 0, 4, 2, 1, POINT),
    ]


def relabel(stratum: CriticalStratumData, label: str) -> CriticalStratumData:
    return CriticalStratumData(
        label, stratum.dimension, stratum.two_f, stratum.two_b, stratum.signature, stratum.poincare
    )


class ScenarioManager:
    """Manager class for bundled scenarios and random test instances."""

    def __init__(self, scenario_dir: Optional[Path] = None, seed: Optional[int] = None):
        """Initialize the scenario manager.

        Args:
            scenario_dir: Directory holding the bundled JSON documents
            seed: Seed for the random instance generator
        """
        self.scenario_dir = Path(scenario_dir) if scenario_dir else SCENARIO_DIR
        self.rng = random.Random(seed)
        self.logger = logging.getLogger(self.__class__.__name__)

    def list_scenarios(self) -> List[str]:
        return sorted(path.stem for path in self.scenario_dir.glob("*.json"))

    def path(self, name: str) -> Path:
        return self.scenario_dir / f"{name}.json"

    def load(self, name: str) -> InputDocument:
        """Load a bundled document by name.

        Args:
            name: File stem under the scenario directory

        Returns:
            Parsed InputDocument
        """
        self.logger.info(f"Loading scenario {name}")
        return load_document(self.path(name))

    def random_rational(self, numerator_range: int = 10, max_denominator: int = 6) -> Fraction:
        return Fraction(self.rng.randint(-numerator_range, numerator_range), self.rng.randint(1, max_denominator))

    def random_positive_rational(self, numerator_range: int = 10, max_denominator: int = 6) -> Fraction:
        return Fraction(self.rng.randint(1, numerator_range), self.rng.randint(1, max_denominator))

    def random_form(self, max_dimension: int = 8, entry_range: int = 10, min_dimension: int = 1) -> IntegerSymmetricForm:
        """Random integer symmetric matrix with entries in [-entry_range, entry_range]."""
        n = self.rng.randint(min_dimension, max_dimension)
        rows = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                rows[i][j] = rows[j][i] = self.rng.randint(-entry_range, entry_range)
        return IntegerSymmetricForm.from_rows(rows)

    def random_form_with_bplus(self, min_bplus: int = 2, max_dimension: int = 8, entry_range: int = 10,
                               nondegenerate: bool = False) -> IntegerSymmetricForm:
        """Draw random forms until one has b⁺ >= min_bplus."""
        while True:
            form = self.random_form(max_dimension, entry_range, min_dimension=max(min_bplus, 1))
            result = inertia(form)
            if result.b_plus >= min_bplus and (not nondegenerate or result.b_zero == 0):
                return form

    def random_positive_class(self, form: IntegerSymmetricForm, coordinate_range: int = 3, attempts: int = 50) -> ClassVector:
        """Integral class with Q(ω, ω) > 0; the first positive diagonal direction if sampling misses."""
        for _ in range(attempts):
            omega = ClassVector(tuple(self.rng.randint(-coordinate_range, coordinate_range) for _ in range(form.dimension)))
            if evaluate(form, omega, omega) > 0:
                return omega
        return clear_denominators(diagonalize(form).column(0))

    def random_form_case(self, max_dimension: int = 8, entry_range: int = 10) -> FormCase:
        form = self.random_form_with_bplus(2, max_dimension, entry_range)
        return FormCase(form, self.random_positive_class(form))

    def random_lambda_case(self, max_length: int = 6) -> LambdaCase:
        k = self.rng.randint(1, max_length)
        return LambdaCase([self.random_rational() for _ in range(k)], self.random_positive_rational())

    def random_interior_level(self, value: Fraction, max_strata: int = 4) -> CriticalLevelData:
        """Random multiset of legal interior critical sets at one level."""
        pool = legal_interior_strata()
        strata = [
            relabel(self.rng.choice(pool), f"x{i}") for i in range(self.rng.randint(1, max_strata))
        ]
        return CriticalLevelData(value, tuple(strata))

    def random_ring(self, max_b1: int = 3, max_b2: int = 4, cup_range: int = 2) -> FourManifoldRing:
        """Nondegenerate ring data with random cup products and the identity as H¹×H³ pairing."""
        b1 = self.rng.randint(0, max_b1)
        form = self.random_form_with_bplus(1, max_b2, entry_range=3, nondegenerate=True)
        cup = tuple(
            tuple(tuple(self.rng.randint(-cup_range, cup_range) for _ in range(b1)) for _ in range(form.dimension))
            for _ in range(b1)
        )
        pairing = tuple(tuple(1 if i == k else 0 for k in range(b1)) for i in range(b1))
        return FourManifoldRing(b1, cup, pairing, form)

    def random_lefschetz_data(self, max_b1: int = 3, max_b2: int = 4) -> SixManifoldLefschetzData:
        ring = self.random_ring(max_b1, max_b2)
        omega0 = self.random_positive_class(ring.form)
        beta2 = ClassVector(tuple(self.rng.randint(-2, 2) for _ in range(ring.b2)))
        return SixManifoldLefschetzData(
            ring, omega0, beta2, self.random_rational(), Fraction(1, self.rng.randint(1, 5))
        )
