#!/usr/bin/env python3
"""Example usage of the dhlab library without the CLI."""

import sys
import os

# Add the project root to the Python path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from dhlab.construct import CounterexampleBuilder, CounterexampleInput
from dhlab.dhcore import DensityAnalyzer, DHProfile, ReducedComponentData
from dhlab.errors import DhlabError
from dhlab.exactlin import ClassVector, IntegerSymmetricForm, diagonalize
from dhlab.lefschetz import FourManifoldRing, LefschetzChecker
from dhlab.polycert import Interval
from dhlab.wallcross import WallCrossingEngine
from utils.scenario_data import ScenarioManager


def example_four_torus():
    """Strictly non-log-concave density over the four-torus."""
    print("🧮 Example: four-torus counterexample")
    print("-" * 50)

    form = IntegerSymmetricForm.hyperbolic(3)
    inertia = diagonalize(form)
    print(f"   b+ = {inertia.b_plus}, b- = {inertia.b_minus}, signature = {inertia.signature}")

    builder = CounterexampleBuilder()
    report = builder.build_counterexample(CounterexampleInput(form, ClassVector.of(1, 1, 0, 0, 0, 0), "t4"))
    print(f"   c = {report.c}, epsilon = {report.epsilon}")
    print(f"   f(t) = {report.density} on {report.interval}")
    print(f"   h(t) = {report.defect}: {report.certificate}")


def example_bplus_one_density():
    """b⁺ = 1 quotients give log-concave densities."""
    print("\n📈 Example: b+ = 1 normal form")
    print("-" * 50)

    analyzer = DensityAnalyzer()
    component = ReducedComponentData.from_lambda([0, 1], 1, Interval.symmetric("1/2"))
    density = analyzer.dh_density(component)
    result = analyzer.log_concavity_verdict(DHProfile.single(component.interval, density))
    print(f"   f(t) = {density} on {component.interval}: {result.verdict.value}")

    defect = WallCrossingEngine().bplus_one_defect([2, 1], 1)
    print(f"   2h(t) = {defect.defect2}, discriminant = {defect.discriminant}")


def example_hard_lefschetz():
    """Hard Lefschetz search over a simply connected base."""
    print("\n💡 Example: Hard Lefschetz six-manifold")
    print("-" * 50)

    ring = FourManifoldRing.simply_connected(IntegerSymmetricForm.diagonal(1, 1, -1))
    result = LefschetzChecker().lefschetz_counterexample(ring, ClassVector.of(1, 0, 0), ClassVector.zero(3), 0)
    print(f"   epsilon = {result.epsilon}, Hard Lefschetz: {result.hl.overall}")
    print(f"   f(t) = {result.density}, h(t) = {result.defect}: {result.certificate}")


def example_scenarios():
    """List the bundled scenario documents."""
    print("\n📚 Example: bundled scenarios")
    print("-" * 50)
    manager = ScenarioManager()
    for name in manager.list_scenarios():
        print(f"   - {name} ({manager.load(name).kind})")


def main():
    """Main example function."""
    print("🎯 dhlab Examples")
    print("=" * 60)

    try:
        example_four_torus()
        example_bplus_one_density()
        example_hard_lefschetz()
        example_scenarios()
    except DhlabError as e:
        print(f"\n❌ {type(e).__name__}: {e}")
        return e.exit_code

    print("\n✅ Examples completed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
