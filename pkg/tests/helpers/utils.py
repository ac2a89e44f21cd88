"""
Common utility functions for tests.

Section headers and summary lists for the live log, plus the seeded random
generators used to build formula and matrix corpora.
"""
import logging
import random

from ppcalc.formulas import PpFormula
from ppcalc.linalg import IntMatrix

logger = logging.getLogger(__name__)


def print_section_header(title):
    """
    Print a formatted section header.

    Args:
        title: Section title
    """
    logger.info("\n" + "="*70)
    logger.info(title)
    logger.info("="*70)


def print_summary_list(items, title="Items"):
    """
    Print a formatted list of items.

    Args:
        items: List of items to print
        title: Title for the list (default: "Items")
    """
    logger.info(f"\n{title}:")
    for idx, item in enumerate(items, 1):
        logger.info(f"  [{idx}] {item}")


def random_matrix(rng: random.Random, rows: int, cols: int, bound: int) -> IntMatrix:
    """Matrix with entries drawn uniformly from [-bound, bound]."""
    return IntMatrix.from_rows(
        [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)], cols
    )


def random_formula(rng: random.Random, max_n: int, max_m: int, max_e: int, bound: int) -> PpFormula:
    """Random ``E y (a x = b y)`` with at least one free variable and one equation."""
    n = rng.randint(1, max_n)
    m = rng.randint(0, max_m)
    e = rng.randint(1, max_e)
    return PpFormula(n, m, random_matrix(rng, e, n, bound), random_matrix(rng, e, m, bound))
