"""
Modules and limits exhibited as pure images of chain limits.

For modules the arranged chain reaches an isomorphism at its last stage; for
the Prufer family the tau chain maps onto every stage, flat-purely but never
injectively. Other limits are arranged stage by stage.
"""
import logging

import pytest

from ppcalc.chains import (
    arrange_l_chain,
    arrange_limit_chain,
    prufer_tau_realization,
    realize_as_pure_image,
)
from ppcalc.errors import BudgetExhaustedError, ChainNotVerifiedError, DimensionError
from ppcalc.implication import TestClass
from ppcalc.limits import OmegaLimit
from ppcalc.linalg import IntMatrix
from ppcalc.modules import check_hom, cyclic_module, finite_abelian

from tests.helpers import assert_no_problems, print_section_header
from tests.helpers.constants import PRUFER_BUDGET

logger = logging.getLogger(__name__)

ABSOLUTE = TestClass.absolute()
FLAT = TestClass.flat()


@pytest.mark.critical
@pytest.mark.parametrize(
    "name,module",
    [
        ("Z/8", finite_abelian(8)),
        ("Z/2+Z/4", finite_abelian(2, 4)),
        ("Z^2+Z/3", finite_abelian(0, 0, 3)),
    ],
)
def test_module_realization(name, module):
    print_section_header(f"PURE-IMAGE REALIZATION OF {name}")
    realization = realize_as_pure_image(module, ABSOLUTE)
    report = realization.report
    assert_no_problems(f"REALIZATION OF {name}", report.find_problems(), f"{name} realized")
    assert report.compatible
    assert report.final_isomorphism
    assert report.surjective
    assert report.pure_on_generators
    assert all(s.target_stage is None for s in report.stages)
    assert len(realization.maps) == realization.chain.length


@pytest.mark.quick
def test_partial_stages_are_pure_embeddings():
    """Z^2 + Z/3: stage 0 embeds the free part, stage 1 is onto."""
    realization = realize_as_pure_image(finite_abelian(0, 0, 3), ABSOLUTE)
    first, last = realization.report.stages
    assert first.injective and first.pure_on_generators and not first.surjective
    assert last.surjective and last.injective


@pytest.mark.quick
def test_module_budget_too_small():
    with pytest.raises(BudgetExhaustedError) as excinfo:
        realize_as_pure_image(finite_abelian(0, 0, 3), ABSOLUTE, budget=0)
    assert excinfo.value.partial is not None


@pytest.mark.quick
def test_explicit_chain_for_a_module():
    m = finite_abelian(2, 4)
    chain = arrange_l_chain(m, generator_order=[1, 0])
    realization = realize_as_pure_image(m, ABSOLUTE, chain=chain)
    assert realization.chain == chain
    assert realization.report.final_isomorphism


@pytest.mark.critical
def test_prufer_tau_realization_is_flat(prufer_limit):
    print_section_header("TAU CHAIN ONTO THE PRUFER FAMILY")
    realization = realize_as_pure_image(prufer_limit, FLAT)
    report = realization.report
    assert len(report.stages) == PRUFER_BUDGET - 1
    assert [s.target_stage for s in report.stages] == list(range(2, PRUFER_BUDGET + 1))
    assert report.compatible
    assert all(s.surjective and s.pure_on_generators for s in report.stages)
    assert not any(s.injective for s in report.stages)
    assert not report.final_isomorphism
    assert_no_problems("FLAT TAU REALIZATION", report.find_problems())


@pytest.mark.quick
def test_prufer_tau_realization_is_not_absolutely_pure(prufer_limit):
    report = realize_as_pure_image(prufer_limit, ABSOLUTE).report
    assert not report.pure_on_generators
    problems = report.find_problems()
    assert any("not injective" in p for p in problems)
    assert any("pure on generators" in p for p in problems)


@pytest.mark.quick
def test_tau_realization_needs_room():
    with pytest.raises(BudgetExhaustedError):
        prufer_tau_realization(OmegaLimit.prufer(2, 1))
    with pytest.raises(DimensionError):
        prufer_tau_realization(OmegaLimit.cyclic_sum([2, 4]))


@pytest.mark.critical
def test_cyclic_sum_is_realized_stage_by_stage():
    """Stage i of the arranged chain maps onto stage i, compatibly with the summand inclusions."""
    print_section_header("STAGEWISE REALIZATION OF A CYCLIC SUM")
    lim = OmegaLimit.cyclic_sum([2, 4, 8])
    realization = realize_as_pure_image(lim, ABSOLUTE)
    report = realization.report
    assert [s.target_stage for s in report.stages] == [0, 1, 2]
    assert report.compatible
    assert all(s.surjective and s.injective and s.pure_on_generators for s in report.stages)
    assert report.final_isomorphism
    assert realization.chain.blocks == (0, 1, 2, 3)
    for i, h in enumerate(realization.maps):
        assert h.target == lim.stage(i)
        assert realization.limit.stage(i).invariant_factors == lim.stage(i).invariant_factors
    assert_no_problems("CYCLIC SUM REALIZATION", report.find_problems())


@pytest.mark.quick
def test_limit_chain_follows_the_connecting_maps():
    lim = OmegaLimit.cyclic_powers(3, 2)
    chain, assign = arrange_limit_chain(lim)
    assert chain.is_verified(ABSOLUTE)
    assert chain.length == 3
    for i in range(2):
        _, images = assign(i)
        _, next_images = assign(i + 1)
        pushed = lim.connecting_map(i).apply_tuple(images)
        assert next_images.prefix(images.arity) == pushed

    shorter = realize_as_pure_image(lim, ABSOLUTE, budget=1)
    assert [s.target_stage for s in shorter.report.stages] == [0, 1]
    assert shorter.report.compatible


@pytest.mark.quick
def test_limit_that_loses_purity_on_images_is_rejected():
    """Z/2 -> Z/4 -> Z/8 by doubling: 2 in Z/4 becomes divisible by 4 in Z/8."""
    z2, z4, z8 = cyclic_module(2), cyclic_module(4), cyclic_module(8)
    doubling = OmegaLimit.explicit(
        [z2, z4, z8],
        [check_hom(z2, z4, IntMatrix.from_rows([[2]])), check_hom(z4, z8, IntMatrix.from_rows([[2]]))],
    )
    chain, _ = arrange_limit_chain(doubling)
    assert not chain.is_verified(ABSOLUTE)
    with pytest.raises(ChainNotVerifiedError):
        realize_as_pure_image(doubling, ABSOLUTE)

    chain = arrange_l_chain(doubling.stage(1))
    with pytest.raises(DimensionError):
        realize_as_pure_image(doubling, ABSOLUTE, chain=chain)
