"""
Pytest fixtures for the ppcalc test suite.

This is the main conftest.py that orchestrates fixture loading from
domain-specific conftest modules. It contains only:
- Configuration fixtures (budget, seed)
- Pytest hooks and configuration
- Plugin imports via pytest_plugins

Fixture Organization:
    - conftest_modules.py: module pool, small named modules, Prufer limits
    - conftest_formulas.py: seeded random formula corpus, worked-example formulas
"""
import logging
import os
import sys
from pathlib import Path

import pytest

from ppcalc.config import resolve_budget


logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240601

AREAS = ("linalg", "modules", "formulas", "implication", "engine", "cli")


# =============================================================================
# PYTEST PLUGINS - Import fixtures from domain-specific conftest modules
# =============================================================================

pytest_plugins = [
    "tests.conftest_modules",
    "tests.conftest_formulas",
]


# =============================================================================
# CONFIGURATION FIXTURES
# =============================================================================

@pytest.fixture(scope="session")
def budget(request):
    """Stage budget from CLI, env var, or default.

    Priority order:
    1. CLI argument: --budget
    2. Environment variable: PPCALC_BUDGET
    3. Default: 16

    Scope: session (shared across all tests)
    """
    return resolve_budget(request.config.getoption("--budget", default=None))


@pytest.fixture(scope="session")
def seed(request):
    """Seed for every randomized suite: --seed > PPCALC_TEST_SEED > fixed default."""
    cli_seed = request.config.getoption("--seed", default=None)
    if cli_seed is not None:
        return cli_seed

    env_seed = os.getenv("PPCALC_TEST_SEED")
    if env_seed:
        return int(env_seed)

    return DEFAULT_SEED


# =============================================================================
# PYTEST CONFIGURATION
# =============================================================================

def pytest_addoption(parser):
    """Add custom command-line options."""
    parser.addoption(
        "--budget",
        action="store",
        type=int,
        default=None,
        help="Stage budget for limit and chain tests (default: $PPCALC_BUDGET or 16)",
    )
    parser.addoption(
        "--seed",
        action="store",
        type=int,
        default=None,
        help=f"Seed for random corpora (default: $PPCALC_TEST_SEED or {DEFAULT_SEED})",
    )


def pytest_configure(config):
    """Configure pytest with custom settings."""
    # Allure report metadata (environment properties)
    report_dir = getattr(config.option, "allure_report_dir", None) or "allure-results"
    allure_env_path = Path(report_dir) / "environment.properties"
    allure_env_path.parent.mkdir(parents=True, exist_ok=True)
    with open(allure_env_path, "w") as f:
        f.write("Project=ppcalc Test Suite\n")
        f.write(f"Seed={os.getenv('PPCALC_TEST_SEED', DEFAULT_SEED)}\n")
        f.write(f"Budget={os.getenv('PPCALC_BUDGET', 'default')}\n")
        f.write(f"Tester={os.getenv('USER', 'CI/CD Pipeline')}\n")
        f.write(f"Commit={os.getenv('GIT_COMMIT', 'N/A')}\n")
        f.write(f"Python.version={sys.version_info.major}.{sys.version_info.minor}.{sys.version_info.micro}\n")

    config.option.verbose = max(config.option.verbose, 1)


def pytest_collection_modifyitems(config, items):
    """Add the area marker of each test from its directory (tests/<area>/...)."""
    for item in items:
        path = Path(str(item.fspath)).as_posix()
        for area in AREAS:
            if f"tests/{area}/" in path:
                item.add_marker(getattr(pytest.mark, area))


# =============================================================================
# TERMINAL SUMMARY
# =============================================================================

def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Short pass/fail summary after the run."""
    terminalreporter.section("Summary", sep="=", bold=True)
    passed = len(terminalreporter.stats.get("passed", []))
    failed = len(terminalreporter.stats.get("failed", []))
    skipped = len(terminalreporter.stats.get("skipped", []))

    terminalreporter.write_line(f"Passed: {passed}")
    terminalreporter.write_line(f"Failed: {failed}")
    if skipped:
        terminalreporter.write_line(f"Skipped: {skipped}")
