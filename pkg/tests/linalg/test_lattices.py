"""Lattices and integer linear systems"""
import itertools
import logging
import random

import pytest

from ppcalc.errors import DimensionError
from ppcalc.linalg import (
    IntMatrix,
    Lattice,
    lattice_compare,
    lattice_contains,
    lattice_equals,
    lattice_intersection,
    lattice_sum,
    left_kernel,
    solve_linear,
    solve_rows,
)

from tests.helpers import assert_no_problems, brute_force_solve, print_section_header, random_matrix
from tests.helpers.constants import SOLVE_ENTRY_BOUND, SOLVE_MAX_DIM, SOLVE_SEARCH_BOX

logger = logging.getLogger(__name__)


def multiples(r, dim=1):
    return Lattice.from_generators(dim, [[r] + [0] * (dim - 1)])


@pytest.mark.quick
@pytest.mark.critical
def test_lattice_compare_worked_examples():
    """2Z contains 4Z, 2Z + 3Z = Z, 2Z meet 3Z = 6Z."""
    two, three, four = multiples(2), multiples(3), multiples(4)

    assert lattice_compare(two, four, "contains") is True
    assert lattice_compare(four, two, "contains") is False
    assert lattice_compare(two, three, "sum") == Lattice.full(1)
    assert lattice_compare(two, three, "intersection") == multiples(6)
    assert lattice_compare(two, multiples(-2), "equals") is True

    with pytest.raises(ValueError):
        lattice_compare(two, three, "union")


@pytest.mark.quick
def test_lattice_operations_reject_dimension_mismatch():
    with pytest.raises(DimensionError):
        lattice_sum(multiples(2), multiples(2, dim=2))


@pytest.mark.quick
def test_lattice_equality_is_basis_equality():
    """Different generating sets of one lattice share the HNF basis."""
    x = Lattice.from_generators(2, [[4, 0], [4, 4], [8, 0]])
    y = Lattice.from_generators(2, [[0, 4], [4, 0]])
    assert x == y
    assert x.basis.to_list() == [[4, 0], [0, 4]]
    assert x.index() == 16
    assert Lattice.from_generators(2, [[1, 1]]).index() == 0


@pytest.mark.quick
def test_sum_and_intersection_properties(seed):
    """Sums contain both parts, intersections lie in both, both commute and associate."""
    rng = random.Random(seed)
    problems = []
    for trial in range(60):
        x, y, z = (
            Lattice.from_generators(3, random_matrix(rng, rng.randint(1, 3), 3, 6).entries)
            for _ in range(3)
        )
        s, i = lattice_sum(x, y), lattice_intersection(x, y)
        if not (lattice_contains(s, x) and lattice_contains(s, y)):
            problems.append(f"trial {trial}: sum misses a summand")
        if not (lattice_contains(x, i) and lattice_contains(y, i)):
            problems.append(f"trial {trial}: intersection not inside both lattices")
        if not lattice_equals(s, lattice_sum(y, x)) or not lattice_equals(i, lattice_intersection(y, x)):
            problems.append(f"trial {trial}: operations do not commute")
        if lattice_sum(lattice_sum(x, y), z) != lattice_sum(x, lattice_sum(y, z)):
            problems.append(f"trial {trial}: sum is not associative")
        if lattice_intersection(lattice_intersection(x, y), z) != lattice_intersection(x, lattice_intersection(y, z)):
            problems.append(f"trial {trial}: intersection is not associative")
    assert_no_problems("LATTICE PROPERTIES", problems)


@pytest.mark.quick
def test_intersection_matches_enumeration():
    """Points of a small box lying in both lattices are exactly those of the intersection."""
    x = Lattice.from_generators(2, [[2, 1], [0, 3]])
    y = Lattice.from_generators(2, [[3, 0], [1, 2]])
    meet = lattice_intersection(x, y)
    for v in itertools.product(range(-8, 9), repeat=2):
        assert meet.contains_vector(v) == (x.contains_vector(v) and y.contains_vector(v)), v


@pytest.mark.quick
@pytest.mark.critical
def test_solve_linear_worked_examples():
    """2v = 4 has v = 2; 2v = 3 has no solution; v1 + v2 = 0 has kernel (1, -1)."""
    particular, kernel = solve_linear(IntMatrix.from_rows([[2]]), [4])
    assert particular == (2,)
    assert kernel.rank == 0

    assert solve_linear(IntMatrix.from_rows([[2]]), [3]) is None

    particular, kernel = solve_linear(IntMatrix.from_rows([[1, 1]]), [0])
    assert particular == (0, 0)
    assert kernel == Lattice.from_generators(2, [[1, -1]])

    with pytest.raises(DimensionError):
        solve_linear(IntMatrix.from_rows([[1, 1]]), [0, 0])


@pytest.mark.quick
def test_solve_rows_and_left_kernel_agree():
    m = IntMatrix.from_rows([[2, 4], [3, 6], [1, 2]])
    kernel = left_kernel(m)
    for g in kernel.generators:
        assert IntMatrix.from_rows([g]) @ m == IntMatrix.zeros(1, 2)
    solved = solve_rows(m, [5, 10])
    assert solved is not None
    x, _ = solved
    assert IntMatrix.from_rows([x]) @ m == IntMatrix.from_rows([[5, 10]])
    assert solve_rows(m, [1, 1]) is None


@pytest.mark.slow
@pytest.mark.critical
def test_solve_linear_matches_bounded_search(seed):
    """Whenever a bounded search finds an integer solution, solve_linear finds one too.

    Entries are at most 5 in absolute value and dimensions at most 3. Returned
    solutions are checked by substitution, and every kernel basis vector solves
    the homogeneous system.
    """
    print_section_header("SOLVE_LINEAR AGAINST BOUNDED SEARCH")
    rng = random.Random(seed)
    problems = []
    checked = solvable = 0
    for trial in range(200):
        rows, cols = rng.randint(1, SOLVE_MAX_DIM), rng.randint(1, SOLVE_MAX_DIM)
        a = random_matrix(rng, rows, cols, SOLVE_ENTRY_BOUND)
        # half of the right-hand sides are images, so both outcomes occur
        if trial % 2:
            v = [rng.randint(-3, 3) for _ in range(cols)]
            b = [sum(r[j] * v[j] for j in range(cols)) for r in a.entries]
        else:
            b = [rng.randint(-SOLVE_ENTRY_BOUND, SOLVE_ENTRY_BOUND) for _ in range(rows)]
        found = brute_force_solve(a, b, SOLVE_SEARCH_BOX)
        result = solve_linear(a, b)
        checked += 1
        if result is None:
            if found is not None:
                problems.append(f"{a.to_list()} v = {b}: missed solution {found}")
            continue
        solvable += 1
        particular, kernel = result
        if [sum(r[j] * particular[j] for j in range(cols)) for r in a.entries] != b:
            problems.append(f"{a.to_list()} v = {b}: returned non-solution {particular}")
        for g in kernel.generators:
            if any(sum(r[j] * g[j] for j in range(cols)) for r in a.entries):
                problems.append(f"{a.to_list()}: kernel vector {g} is not homogeneous")

    assert_no_problems("SOLVE_LINEAR ORACLE", problems)
    logger.info(f"✅ {checked} systems checked, {solvable} solvable\n")
