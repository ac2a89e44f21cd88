"""
Omega-limits: stages, connecting maps and tail stabilization.

The Prufer family is the main example: its tail types never stabilize
absolutely but collapse at once under the flat class.
"""
import logging
from concurrent.futures import ThreadPoolExecutor

import pytest

from ppcalc.errors import DimensionError, StageOutOfRangeError
from ppcalc.implication import TestClass
from ppcalc.linalg import IntMatrix
from ppcalc.limits import (
    OmegaLimit,
    check_stabilization,
    family_description,
    pure_on_images,
    tail_generators,
    tail_stabilization,
)
from ppcalc.modules import ModuleTuple, check_hom, cyclic_module, finite_abelian

from tests.helpers import assert_invariant_factors, assert_no_problems, print_section_header
from tests.helpers.constants import PRUFER_BUDGET, PRUFER_P

logger = logging.getLogger(__name__)

ABSOLUTE = TestClass.absolute()
FLAT = TestClass.flat()


@pytest.mark.quick
@pytest.mark.critical
def test_prufer_stages(prufer_limit):
    assert prufer_limit.cached_stage_count() == 0
    assert prufer_limit.stage(0).is_zero()
    for k in range(1, PRUFER_BUDGET + 1):
        assert_invariant_factors(prufer_limit.stage(k), [PRUFER_P ** k], f"stage {k}")
    assert prufer_limit.cached_stage_count() == PRUFER_BUDGET + 1
    assert prufer_limit.connecting_map(2).matrix.to_list() == [[PRUFER_P]]
    assert prufer_limit.transition(1, 4).matrix.to_list() == [[PRUFER_P ** 3]]
    assert family_description(prufer_limit) == f"prufer(p={PRUFER_P}) budget={PRUFER_BUDGET}"

    with pytest.raises(StageOutOfRangeError):
        prufer_limit.stage(PRUFER_BUDGET + 1)
    with pytest.raises(StageOutOfRangeError):
        prufer_limit.transition(3, 1)
    with pytest.raises(ValueError):
        OmegaLimit.prufer(1, 4)


@pytest.mark.quick
def test_push_and_tail(prufer_limit):
    one = ModuleTuple.generators(prufer_limit.stage(1))
    pushed = prufer_limit.push(one, 1, 4)
    assert pushed.coords.to_list() == [[8]]
    tail = prufer_limit.tail(one, 1, 4)
    assert [t.coords.to_list() for t in tail] == [[[1]], [[2]], [[4]], [[8]]]
    assert len(tail_generators(prufer_limit, 1, one, 4)) == 4


@pytest.mark.quick
def test_cyclic_sums_and_explicit_limits():
    lim = OmegaLimit.cyclic_sum([2, 4, 8])
    assert lim.budget == 2
    assert_invariant_factors(lim.stage(2), [2, 4, 8])
    assert lim.connecting_map(0).matrix.to_list() == [[1, 0]]
    assert OmegaLimit.cyclic_powers(2, 2).stage(2) == lim.stage(2)
    with pytest.raises(StageOutOfRangeError):
        OmegaLimit.cyclic_sum([2, 4], 5)

    z2, z4 = cyclic_module(2), cyclic_module(4)
    g = check_hom(z2, z4, IntMatrix.from_rows([[2]]))
    explicit = OmegaLimit.explicit([z2, z4], [g])
    assert explicit.budget == 1
    assert explicit.connecting_map(0) == g
    with pytest.raises(DimensionError):
        OmegaLimit.explicit([z2, z4, z2], [g])
    with pytest.raises(DimensionError):
        OmegaLimit.explicit([z4, z2], [g])


@pytest.mark.critical
def test_prufer_tail_stabilizes_only_flatly(prufer_limit):
    """The tail of 1 in Z/p: flat-stable at once, a strict absolute chain through the budget."""
    print_section_header("PRUFER TAIL")
    start = ModuleTuple.generators(prufer_limit.stage(1))

    flat = tail_stabilization(prufer_limit, 1, start, FLAT)
    assert flat.stabilized
    assert flat.stage == 1
    assert_no_problems("FLAT TAIL", check_stabilization(flat))

    absolute = tail_stabilization(prufer_limit, 1, start, ABSOLUTE)
    assert not absolute.stabilized
    assert absolute.stage is None and absolute.formula is None
    assert len(absolute.chain) == PRUFER_BUDGET
    assert absolute.chain_stages == tuple(range(1, PRUFER_BUDGET + 1))
    assert_no_problems("ABSOLUTE TAIL", check_stabilization(absolute), "Absolute tail is strictly descending")


@pytest.mark.quick
def test_tail_edge_cases(prufer_limit):
    start = ModuleTuple.generators(prufer_limit.stage(3))
    single = tail_stabilization(prufer_limit, 3, start, ABSOLUTE, budget=3)
    assert single.stabilized and single.stage == 3

    with pytest.raises(StageOutOfRangeError):
        tail_stabilization(prufer_limit, 3, start, ABSOLUTE, budget=PRUFER_BUDGET + 1)
    with pytest.raises(DimensionError):
        tail_stabilization(prufer_limit, 2, start, ABSOLUTE)

    summands = OmegaLimit.cyclic_sum([2, 4, 8])
    verdict = tail_stabilization(summands, 0, ModuleTuple.generators(summands.stage(0)), ABSOLUTE)
    assert verdict.stabilized and verdict.stage == 0


@pytest.mark.critical
def test_pure_on_images(prufer_limit):
    assert pure_on_images(prufer_limit, FLAT).holds
    absolute = pure_on_images(prufer_limit, ABSOLUTE)
    assert absolute.failing() == list(range(1, PRUFER_BUDGET - 1))

    assert pure_on_images(OmegaLimit.cyclic_sum([2, 4, 8, 16]), ABSOLUTE).holds
    assert pure_on_images(OmegaLimit.cyclic_sum([3, 9, 27]), ABSOLUTE, budget=2).stages == ((0, True),)
    assert finite_abelian(2, 4) == OmegaLimit.cyclic_sum([2, 4]).stage(1)


@pytest.mark.quick
@pytest.mark.important
def test_stage_cache_is_shared_across_threads(monkeypatch):
    """Concurrent readers get the same stage objects, each stage built exactly once."""
    lim = OmegaLimit.cyclic_powers(2, 12)
    built = []
    build_stage = lim._build_stage

    def counting_build(k):
        built.append(k)
        return build_stage(k)

    monkeypatch.setattr(lim, "_build_stage", counting_build)
    requests = [k for k in reversed(range(13)) for _ in range(4)]
    # stage and map reads race from a cold cache
    calls = [(kind, k) for k in requests for kind in ("stage", "map") if not (kind == "map" and k == 12)]
    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(
            lambda call: lim.stage(call[1]) if call[0] == "stage" else lim.connecting_map(call[1]),
            calls,
        ))

    assert sorted(built) == list(range(13))
    assert lim.cached_stage_count() == 13
    problems = []
    for (kind, k), result in zip(calls, results):
        if kind == "stage" and result is not lim.stage(k):
            problems.append(f"stage {k}: reader got a different object")
        if kind == "map" and (result.source is not lim.stage(k) or result.target is not lim.stage(k + 1)):
            problems.append(f"map {k}: does not connect the cached stages")
    assert_no_problems("CONCURRENT STAGE CACHE", problems)
