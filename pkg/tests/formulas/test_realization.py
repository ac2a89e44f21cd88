"""Free realizations, type generators and quantifier-free types"""
import itertools
import logging

import pytest

from ppcalc.dsl import parse_formula
from ppcalc.formulas import (
    PointedModule,
    annihilation,
    divisibility,
    evaluate,
    free_realization,
    pp_type_generator,
    qf_annihilator,
    qf_type_formula,
    realization_map,
    satisfies,
    substitute,
)
from ppcalc.implication import TestClass, equivalent, implies, strictly_implies, type_implies
from ppcalc.linalg import IntMatrix, Lattice
from ppcalc.modules import ModuleTuple, cyclic_module, finite_abelian

from tests.helpers import assert_invariant_factors, assert_no_problems, feasible, subgroup_elements
from tests.helpers.constants import BRUTE_FORCE_LIMIT

logger = logging.getLogger(__name__)

# tuples per (formula, module) checked for universality
SAMPLES_PER_PAIR = 6


@pytest.mark.quick
@pytest.mark.critical
def test_free_realization_examples():
    """2x = 0 is realized by Z/2, 2|x by Z with x = 2, and x = 0 by the zero tuple."""
    two_torsion = free_realization(annihilation(2))
    assert_invariant_factors(two_torsion.module, [2], "realization of 2x = 0")
    assert satisfies(annihilation(2), two_torsion.tuple)

    divisible = free_realization(divisibility(2))
    assert_invariant_factors(divisible.module, [0], "realization of 2|x")
    assert divisible.module.element_order(divisible.tuple.entry(0)) == 0
    assert not divisible.tuple.is_zero()

    zero = free_realization(parse_formula("x1 = 0"))
    assert zero.tuple.is_zero()

    both = free_realization(parse_formula("2|x1 & 2*x1 = 0"))
    assert_invariant_factors(both.module, [4], "realization of 2|x & 2x = 0")


@pytest.mark.critical
def test_realization_map_is_universal(formula_corpus, module_pool):
    """Every tuple satisfying phi is the image of the free tuple; the others are not."""
    problems = []
    small = [(name, m) for name, m in module_pool if m.order() <= 9]
    for i, phi in enumerate(formula_corpus):
        free = free_realization(phi)
        for name, module in small:
            if not feasible(phi, module, BRUTE_FORCE_LIMIT):
                continue
            inside = evaluate(phi, module)
            tuples = list(itertools.islice(module.enumerate_tuples(phi.n), 4 * SAMPLES_PER_PAIR))
            for t in tuples:
                h = realization_map(phi, t)
                if inside.contains(t):
                    if h is None:
                        problems.append(f"formula {i} in {name}: no map onto {t.flatten()}")
                    elif h.apply_tuple(free.tuple) != t:
                        problems.append(f"formula {i} in {name}: map misses {t.flatten()}")
                elif h is not None:
                    problems.append(f"formula {i} in {name}: map onto {t.flatten()} outside phi(M)")
    assert_no_problems("REALIZATION UNIVERSALITY", problems)


@pytest.mark.quick
@pytest.mark.critical
def test_type_generator_of_two_in_z4(z4_two):
    """The type of 2 in Z/4 is generated by 2|x & 2x = 0, and flat-equivalent to x = 0."""
    phi = pp_type_generator(z4_two)
    assert satisfies(phi, z4_two.tuple)
    assert equivalent(phi, parse_formula("2|x1 & 2*x1 = 0"), TestClass.absolute())
    assert equivalent(phi, parse_formula("x1 = 0"), TestClass.flat())
    assert qf_annihilator(z4_two).to_list() == [[2]]


@pytest.mark.quick
def test_type_generator_dominates_the_type(formula_corpus, module_pool):
    """A tuple satisfies psi exactly when its type generator implies psi."""
    absolute = TestClass.absolute()
    problems = []
    pointed = [
        PointedModule.of(module, [[(j + 1) * g for g in module.generator(0)] for j in range(n)])
        for _, module in module_pool[:4]
        for n in (1, 2, 3)
    ]
    for p in pointed:
        generator = pp_type_generator(p)
        for i, psi in enumerate(formula_corpus):
            if psi.n != p.arity:
                continue
            holds = satisfies(psi, p.tuple)
            if implies(generator, psi, absolute).holds != holds:
                problems.append(f"{p.module.describe()}: formula {i} satisfied={holds} disagrees with implication")
    assert_no_problems("TYPE GENERATOR", problems)


@pytest.mark.quick
def test_types_grow_along_maps(z4_two):
    """2 in Z/4 maps to 4 in Z/8; the image satisfies more, but not the other way round."""
    image = PointedModule.of(cyclic_module(8), [[4]])
    absolute = TestClass.absolute()
    assert type_implies(image, z4_two, absolute)
    assert not type_implies(z4_two, image, absolute)
    assert strictly_implies(pp_type_generator(image), pp_type_generator(z4_two), absolute)


@pytest.mark.quick
def test_qf_annihilator_examples():
    """(2, 3) in Z/6 satisfies c1*x1 + c2*x2 = 0 exactly for 3|c1 and 2|c2."""
    p = PointedModule.of(cyclic_module(6), [[2], [3]])
    assert qf_annihilator(p).to_list() == [[3, 0], [0, 2]]
    lattice = Lattice.from_matrix(qf_annihilator(p))
    for c1, c2 in itertools.product(range(-6, 7), repeat=2):
        assert lattice.contains_vector([c1, c2]) == ((2 * c1 + 3 * c2) % 6 == 0)

    psi = qf_type_formula(p)
    assert psi.is_quantifier_free()
    assert satisfies(psi, p.tuple)

    generators = PointedModule.of(finite_abelian(2, 4), [[1, 0], [0, 1]])
    assert qf_annihilator(generators).to_list() == [[2, 0], [0, 4]]


@pytest.mark.quick
def test_qf_type_is_weaker_than_pp_type(z4_two):
    absolute = TestClass.absolute()
    assert implies(pp_type_generator(z4_two), qf_type_formula(z4_two), absolute).holds
    assert not implies(qf_type_formula(z4_two), pp_type_generator(z4_two), absolute).holds


@pytest.mark.quick
def test_substitute_pushes_tuples_forward(z4):
    """(x, 3x) for x with 2x = 0 is {(0, 0), (2, 2)} in Z/4."""
    phi = substitute(annihilation(2), IntMatrix.from_rows([[1], [3]]))
    assert phi.n == 2
    assert subgroup_elements(evaluate(phi, z4)) == {(0, 0), (2, 2)}

    t = ModuleTuple.of(z4, [[2]])
    pushed = ModuleTuple.of(z4, [[2], [6]])
    assert satisfies(annihilation(2), t) and satisfies(phi, pushed)
