"""Elementary duality of pp formulas"""
import logging

import pytest

from ppcalc.dsl import parse_formula
from ppcalc.formulas import annihilation, bottom, divisibility, dualize, join, meet, top
from ppcalc.implication import TestClass, equivalent, implies

from tests.helpers import assert_no_problems, print_section_header

logger = logging.getLogger(__name__)

ABSOLUTE = TestClass.absolute()


@pytest.mark.quick
@pytest.mark.critical
@pytest.mark.parametrize("r", [2, 3, 6, 12])
def test_dual_of_divisibility_is_annihilation(r):
    assert equivalent(dualize(divisibility(r)), annihilation(r), ABSOLUTE)
    assert equivalent(dualize(annihilation(r)), divisibility(r), ABSOLUTE)


@pytest.mark.quick
@pytest.mark.critical
def test_top_and_bottom_swap():
    for n in (1, 2, 3):
        assert equivalent(dualize(bottom(n)), top(n), ABSOLUTE)
        assert equivalent(dualize(top(n)), bottom(n), ABSOLUTE)


@pytest.mark.quick
def test_dual_shape():
    """One bound variable per equation; the free arity is kept."""
    phi = parse_formula("E y1 . x1 = 2*y1 & x2 + y1 = 0 & 3*x1 = 0")
    dual = dualize(phi)
    assert dual.n == phi.n
    assert dual.m == phi.equations
    assert dual.equations == phi.n + phi.m


@pytest.mark.critical
def test_double_dual_is_equivalent(formula_corpus):
    """D(D(phi)) ~ phi over all groups."""
    print_section_header("DOUBLE DUAL")
    problems = [
        f"formula {i}: D(D(phi)) differs from phi"
        for i, phi in enumerate(formula_corpus)
        if not equivalent(dualize(dualize(phi)), phi, ABSOLUTE)
    ]
    assert_no_problems("DOUBLE DUAL", problems, f"D(D(phi)) ~ phi for all {len(formula_corpus)} formulas")


@pytest.mark.critical
def test_duality_reverses_implication(corpus_pairs):
    """phi -> psi exactly when D(psi) -> D(phi); meets and joins swap."""
    problems = []
    for i, (phi, psi) in enumerate(corpus_pairs):
        forward = implies(phi, psi, ABSOLUTE).holds
        backward = implies(dualize(psi), dualize(phi), ABSOLUTE).holds
        if forward != backward:
            problems.append(f"pair {i}: phi -> psi is {forward}, D(psi) -> D(phi) is {backward}")
        if not equivalent(dualize(meet(phi, psi)), join(dualize(phi), dualize(psi)), ABSOLUTE):
            problems.append(f"pair {i}: D(phi & psi) is not D(phi) + D(psi)")
        if not equivalent(dualize(join(phi, psi)), meet(dualize(phi), dualize(psi)), ABSOLUTE):
            problems.append(f"pair {i}: D(phi + psi) is not D(phi) & D(psi)")
    assert_no_problems("ANTITONE DUALITY", problems)


@pytest.mark.quick
def test_abspure_is_flat_on_duals(corpus_pairs):
    abspure, flat = TestClass.abspure(), TestClass.flat()
    for phi, psi in corpus_pairs:
        assert implies(phi, psi, abspure).holds == implies(dualize(psi), dualize(phi), flat).holds


@pytest.mark.quick
def test_flat_is_abspure_on_duals(corpus_pairs):
    """The other direction of the round trip: flat(phi, psi) = abspure(D psi, D phi)."""
    abspure, flat = TestClass.abspure(), TestClass.flat()
    problems = [
        f"pair {i}: flat {implies(phi, psi, flat).holds}, abspure on duals disagrees"
        for i, (phi, psi) in enumerate(corpus_pairs)
        if implies(phi, psi, flat).holds != implies(dualize(psi), dualize(phi), abspure).holds
    ]
    assert_no_problems("FLAT VIA ABSPURE DUALS", problems)


@pytest.mark.quick
def test_flat_and_abspure_examples():
    """Torsion vanishes in flat groups; everything is divisible in absolutely pure ones."""
    flat, abspure = TestClass.flat(), TestClass.abspure()
    assert equivalent(annihilation(2), bottom(1), flat)
    assert not equivalent(annihilation(2), bottom(1), ABSOLUTE)
    assert equivalent(divisibility(2), top(1), abspure)
    assert not implies(top(1), divisibility(2), flat).holds
