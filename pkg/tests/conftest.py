"""Pytest configuration, fixtures and custom assertions for the dhlab suite."""

import pytest
import logging
import os
from datetime import datetime
from fractions import Fraction
from typing import Optional, Sequence

from dotenv import load_dotenv

from dhlab.construct import CounterexampleBuilder
from dhlab.dhcore import DensityAnalyzer
from dhlab.exactlin import ClassVector, IntegerSymmetricForm
from dhlab.lefschetz import LefschetzChecker
from dhlab.polycert import Interval, SignKind, SignVerdict, UnivariatePolynomial
from dhlab.wallcross import WallCrossingEngine
from utils.scenario_data import ScenarioManager

# Load environment variables
load_dotenv()

DEFAULT_SEED = 20240601
DEFAULT_TRIALS = 200


# Configure logging
def setup_logging():
    """Set up logging configuration."""
    log_dir = "logs"
    os.makedirs(log_dir, exist_ok=True)

    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_file = os.path.join(log_dir, f"test_run_{timestamp}.log")

    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_file),
            logging.StreamHandler()
        ]
    )

    return logging.getLogger(__name__)


# Set up logging at module level
logger = setup_logging()


@pytest.fixture(scope="session")
def test_seed() -> int:
    """Seed for every randomized suite (DHLAB_TEST_SEED)."""
    return int(os.getenv("DHLAB_TEST_SEED", DEFAULT_SEED))


@pytest.fixture(scope="session")
def random_trials() -> int:
    """Number of random instances per property suite (DHLAB_RANDOM_TRIALS)."""
    return int(os.getenv("DHLAB_RANDOM_TRIALS", DEFAULT_TRIALS))


@pytest.fixture(scope="function")
def scenario_manager(test_seed: int) -> ScenarioManager:
    """Fresh, identically seeded manager for each test."""
    return ScenarioManager(seed=test_seed)


@pytest.fixture(scope="function")
def analyzer() -> DensityAnalyzer:
    return DensityAnalyzer()


@pytest.fixture(scope="function")
def engine() -> WallCrossingEngine:
    return WallCrossingEngine()


@pytest.fixture(scope="function")
def builder() -> CounterexampleBuilder:
    return CounterexampleBuilder()


@pytest.fixture(scope="function")
def checker() -> LefschetzChecker:
    return LefschetzChecker()


@pytest.fixture(scope="session")
def t4_form() -> IntegerSymmetricForm:
    """H ⊕ H ⊕ H, the intersection form of the four-torus."""
    return IntegerSymmetricForm.hyperbolic(3)


@pytest.fixture(scope="session")
def t4_omega() -> ClassVector:
    return ClassVector.of(1, 1, 0, 0, 0, 0)


@pytest.fixture(autouse=True)
def setup_test_environment(request):
    """Log the start and end of each test."""
    test_name = request.node.name
    logger.info(f"Starting test: {test_name}")

    os.makedirs("reports", exist_ok=True)

    yield

    if hasattr(request.node, 'rep_call') and request.node.rep_call.failed:
        logger.error(f"Test failed: {test_name}")

    logger.info(f"Completed test: {test_name}")


@pytest.hookimpl(tryfirst=True, hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Hook to record test results on the item."""
    outcome = yield
    rep = outcome.get_result()
    setattr(item, "rep_" + rep.when, rep)


# Pytest markers
def pytest_configure(config):
    """Configure custom pytest markers."""
    config.addinivalue_line("markers", "smoke: mark test as smoke test")
    config.addinivalue_line("markers", "regression: mark test as regression test")
    config.addinivalue_line("markers", "property: mark test as randomized property suite")
    config.addinivalue_line("markers", "cli: mark test as command-line interface test")
    config.addinivalue_line("markers", "slow: mark test as slow running")


# Custom assertions
def assert_exact_certificate(verdict: SignVerdict, expected: SignKind, polynomial: UnivariatePolynomial,
                             interval: Optional[Interval] = None):
    """Custom assertion for a sign certificate: kind plus exact, in-range witnesses."""
    assert verdict.kind is expected, f"Expected {expected.value}, got {verdict.kind.value}"
    for point, value in verdict.witnesses:
        assert polynomial.evaluate(point) == value, f"Witness ({point}, {value}) does not evaluate exactly"
        if interval is not None:
            assert interval.contains(point), f"Witness point {point} lies outside {interval}"
    for lower, upper in verdict.root_brackets:
        assert lower < upper, f"Root bracket ({lower}, {upper}) is empty"
    if expected in (SignKind.POSITIVE_THROUGHOUT, SignKind.NEGATIVE_THROUGHOUT):
        sign = 1 if expected is SignKind.POSITIVE_THROUGHOUT else -1
        failing = [w for w in verdict.witnesses if w[1] * sign <= 0]
        if failing:
            pytest.fail(f"Strict certificate has witnesses of the wrong sign: {failing}")


def assert_kernel_witness(matrix: Sequence[Sequence[Fraction]], witness: Sequence[Fraction]):
    """Custom assertion for a kernel witness: nonzero and mapped to zero exactly."""
    assert any(v != 0 for v in witness), "Kernel witness is the zero vector"
    image = [sum((a * b for a, b in zip(row, witness)), Fraction(0)) for row in matrix]
    assert all(v == 0 for v in image), f"Witness maps to {image}, not to zero"


def assert_numeric_sign_agrees(verdict: SignVerdict, polynomial: UnivariatePolynomial, lower: float, upper: float,
                               samples: int = 1000, tolerance: float = 1e-9):
    """Custom assertion: dense floating sampling never contradicts the exact certificate."""
    numpy = pytest.importorskip("numpy")
    grid = numpy.linspace(lower, upper, samples + 2)[1:-1]
    coefficients = [float(c) for c in reversed(polynomial.coefficients)] or [0.0]
    values = numpy.polyval(coefficients, grid)
    scale = max(1.0, max(abs(c) for c in coefficients)) * max(1.0, abs(lower), abs(upper)) ** len(coefficients)
    significant = values[numpy.abs(values) > tolerance * scale]
    if verdict.is_non_positive():
        assert (significant < 0).all(), f"Sampling finds h > 0 although certified {verdict.kind.value}"
    if verdict.is_non_negative():
        assert (significant > 0).all(), f"Sampling finds h < 0 although certified {verdict.kind.value}"
