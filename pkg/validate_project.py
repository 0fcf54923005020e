#!/usr/bin/env python3
"""Project validation script: structure, syntax, imports and bundled scenarios."""

import os
import sys
import ast
import importlib
from pathlib import Path

REQUIRED_FILES = [
    "requirements.txt",
    "pytest.ini",
    "README.md",
    ".env.example",
]

REQUIRED_DIRECTORIES = ["dhlab", "tests", "utils", "scenarios"]

REQUIRED_PYTHON_FILES = [
    "dhlab/__init__.py",
    "dhlab/__main__.py",
    "dhlab/base.py",
    "dhlab/cli.py",
    "dhlab/config.py",
    "dhlab/construct.py",
    "dhlab/dhcore.py",
    "dhlab/documents.py",
    "dhlab/errors.py",
    "dhlab/exactlin.py",
    "dhlab/lefschetz.py",
    "dhlab/polycert.py",
    "dhlab/wallcross.py",
    "tests/__init__.py",
    "tests/conftest.py",
    "utils/__init__.py",
    "utils/scenario_data.py",
]

IMPORT_CHECKS = [
    ("dhlab.exactlin", "diagonalize"),
    ("dhlab.polycert", "sign_on_interval"),
    ("dhlab.dhcore", "DensityAnalyzer"),
    ("dhlab.wallcross", "WallCrossingEngine"),
    ("dhlab.construct", "CounterexampleBuilder"),
    ("dhlab.lefschetz", "LefschetzChecker"),
    ("dhlab.cli", "main"),
    ("utils.scenario_data", "ScenarioManager"),
]


def validate_python_syntax(file_path):
    """Validate Python file syntax.

    Returns:
        tuple: (is_valid, error_message)
    """
    try:
        ast.parse(Path(file_path).read_text(encoding="utf-8"))
        return True, None
    except SyntaxError as e:
        return False, f"Syntax error: {e}"
    except OSError as e:
        return False, f"Error reading file: {e}"


def check_project_structure():
    missing_items = [f"Missing file: {p}" for p in REQUIRED_FILES if not os.path.exists(p)]
    missing_items += [f"Missing directory: {p}" for p in REQUIRED_DIRECTORIES if not os.path.isdir(p)]
    missing_items += [f"Missing Python file: {p}" for p in REQUIRED_PYTHON_FILES if not os.path.exists(p)]
    return missing_items


def validate_python_files():
    """Validate syntax of all Python files in the project."""
    results = []
    for root, dirs, files in os.walk("."):
        dirs[:] = [d for d in dirs if not d.startswith(".") and d not in ("__pycache__", "examples")]
        for file in files:
            if file.endswith(".py"):
                path = os.path.join(root, file)
                is_valid, error = validate_python_syntax(path)
                results.append({"file": path, "valid": is_valid, "error": error})
    return results


def check_imports():
    """Check that the public entry points resolve."""
    sys.path.insert(0, ".")
    results = []
    for module_name, attribute in IMPORT_CHECKS:
        try:
            module = importlib.import_module(module_name)
            error = None if hasattr(module, attribute) else f"{attribute} not found in module"
        except Exception as e:
            error = str(e)
        results.append({"module": module_name, "attribute": attribute, "success": error is None, "error": error})
    return results


def check_scenarios():
    """Every bundled scenario must parse as an input document."""
    try:
        from utils.scenario_data import ScenarioManager
        from dhlab.errors import DhlabError
    except Exception as e:
        return [f"cannot load scenario manager: {e}"]
    manager = ScenarioManager()
    problems = []
    for name in manager.list_scenarios():
        try:
            manager.load(name)
        except DhlabError as e:
            problems.append(f"{name}: {e}")
    return problems


def main():
    """Main validation function."""
    print("🔍 Validating dhlab")
    print("=" * 60)

    print("\n📁 Checking project structure...")
    missing_items = check_project_structure()
    if missing_items:
        print("❌ Missing items found:")
        for item in missing_items:
            print(f"   - {item}")
    else:
        print("✅ All required files and directories are present")

    print("\n🐍 Validating Python file syntax...")
    syntax_errors = [r for r in validate_python_files() if not r["valid"]]
    if syntax_errors:
        print("❌ Syntax errors found:")
        for result in syntax_errors:
            print(f"   - {result['file']}: {result['error']}")
    else:
        print("✅ All Python files have valid syntax")

    print("\n📦 Checking critical imports...")
    import_errors = [r for r in check_imports() if not r["success"]]
    if import_errors:
        print("❌ Import errors found:")
        for result in import_errors:
            print(f"   - {result['module']}.{result['attribute']}: {result['error']}")
    else:
        print("✅ All critical imports are working")

    print("\n🧾 Parsing bundled scenarios...")
    scenario_problems = check_scenarios()
    if scenario_problems:
        print("❌ Scenario problems found:")
        for problem in scenario_problems:
            print(f"   - {problem}")
    else:
        print("✅ All scenarios parse")

    print("\n📊 Validation Summary")
    print("-" * 30)
    total_issues = len(missing_items) + len(syntax_errors) + len(import_errors) + len(scenario_problems)
    if total_issues == 0:
        print("🎉 Project validation PASSED! All checks successful.")
        return 0
    print(f"⚠️  Project validation found {total_issues} issues that need to be fixed.")
    return 1


if __name__ == "__main__":
    sys.exit(main())
