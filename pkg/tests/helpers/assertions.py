"""
Pytest-specific assertion helpers.

These functions wrap validation functions and call pytest.fail() on errors.
This separation keeps the validation logic pure (no pytest dependency) while
providing convenient test assertions.
"""
import logging

import pytest

from ppcalc.modules import FpModule

logger = logging.getLogger(__name__)


def _log_validation_failure(failure_title, problems, max_display=10):
    """Log a failure section: title banner, problem count, the first ``max_display`` problems."""
    logger.info("\n" + "="*70)
    logger.info(failure_title)
    logger.info("="*70)
    logger.info(f"\n❌ {len(problems)} issue(s) found:\n")

    for error in problems[:max_display]:
        logger.info(f"   • {error}")

    if len(problems) > max_display:
        logger.info(f"   ... and {len(problems) - max_display} more")


def assert_no_problems(title, problems, success_message=None):
    """
    Fail the test with a bulleted list when a validator reported problems.

    Args:
        title: Upper-case title of the failure section
        problems: List returned by a find_* validator
        success_message: Optional line logged when the list is empty

    Raises:
        pytest.fail: If problems is not empty
    """
    if problems:
        _log_validation_failure(f"{title} FAILED", problems)
        pytest.fail(
            f"\n❌ {title.lower()} failed with {len(problems)} problem(s):\n"
            + "\n".join(f"  - {p}" for p in problems[:20])
        )
    if success_message:
        logger.info(f"\n✓ {success_message}")


def assert_invariant_factors(module: FpModule, expected, label="module"):
    """Fail unless the module's invariant factors are exactly ``expected``."""
    actual = list(module.invariant_factors)
    if actual != list(expected):
        _log_validation_failure("INVARIANT FACTORS MISMATCH", [f"{label}: {actual} != {list(expected)}"])
        pytest.fail(f"{label}: invariant factors {actual}, expected {list(expected)}")
    logger.info(f"✓ {label}: {module.describe()}")
