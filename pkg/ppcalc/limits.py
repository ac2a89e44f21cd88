"""
Chains of finitely presented modules of order type omega.

An ``OmegaLimit`` holds stages ``M_0, M_1, ...`` up to its budget together
with connecting maps ``g_k: M_k -> M_(k+1)``. Stages are built on demand and
cached; the cache only ever grows, under a lock, so concurrent readers always
see a consistent prefix.

Built-in families:

- ``prufer(p)``: ``M_k = Z/p^k`` on one generator (``M_0`` is zero), every
  map multiplication by ``p``.
- ``cyclic_sum(r_0, r_1, ...)``: ``M_k = Z/r_0 + ... + Z/r_k``, maps are the
  inclusions of the first summands.
- ``from_chain(chain)``: ``M_k`` is the free realization of the k-th chain
  formula and ``g_k`` sends each canonical variable to the variable of the
  same index.
"""
import logging
import threading
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Callable, Optional, Sequence

from ppcalc.errors import DimensionError, StageOutOfRangeError
from ppcalc.formulas import PointedModule, PpFormula, free_realization, pp_type_generator
from ppcalc.implication import TestClass, equivalent, implies
from ppcalc.linalg import IntMatrix
from ppcalc.modules import (
    FpHom,
    FpModule,
    ModuleTuple,
    check_hom,
    compose,
    cyclic_module,
    finite_abelian,
    identity_hom,
)

if TYPE_CHECKING:
    from ppcalc.chains import LChain

logger = logging.getLogger(__name__)

PRUFER = "prufer"
CYCLIC_SUM = "cyclic_sum"
FROM_CHAIN = "from_chain"
EXPLICIT_CHAIN = "explicit"


@dataclass(eq=False)
class OmegaLimit:
    family: str
    budget: int
    params: dict[str, Any] = field(default_factory=dict)
    chain: Optional["LChain"] = None
    _stages: list[FpModule] = field(default_factory=list, repr=False)
    _maps: list[FpHom] = field(default_factory=list, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    # -- constructors -------------------------------------------------------

    @classmethod
    def prufer(cls, p: int, budget: int) -> "OmegaLimit":
        if p < 2:
            raise ValueError(f"prime parameter must be at least 2, got {p}")
        return cls(PRUFER, budget, {"p": p})

    @classmethod
    def cyclic_sum(cls, orders: Sequence[int], budget: Optional[int] = None) -> "OmegaLimit":
        orders = [int(r) for r in orders]
        if not orders:
            raise ValueError("cyclic_sum needs at least one order")
        limit = len(orders) - 1
        if budget is None:
            budget = limit
        if budget > limit:
            raise StageOutOfRangeError(f"budget {budget} exceeds the {len(orders)} listed orders")
        return cls(CYCLIC_SUM, budget, {"orders": orders})

    @classmethod
    def cyclic_powers(cls, p: int, budget: int) -> "OmegaLimit":
        """``cyclic_sum`` with ``r_j = p^(j+1)``."""
        return cls.cyclic_sum([p ** (j + 1) for j in range(budget + 1)], budget)

    @classmethod
    def from_chain(cls, chain: "LChain", budget: Optional[int] = None) -> "OmegaLimit":
        limit = len(chain.alphas) - 1
        if budget is None:
            budget = limit
        if budget > limit:
            raise StageOutOfRangeError(f"budget {budget} exceeds chain length {len(chain.alphas)}")
        return cls(FROM_CHAIN, budget, {}, chain)

    @classmethod
    def explicit(cls, stages: Sequence[FpModule], maps: Sequence[FpHom]) -> "OmegaLimit":
        if not stages:
            raise ValueError("an explicit chain needs at least one stage")
        if len(maps) != len(stages) - 1:
            raise DimensionError(f"{len(stages)} stages need {len(stages) - 1} maps, got {len(maps)}")
        for k, g in enumerate(maps):
            if g.source != stages[k] or g.target != stages[k + 1]:
                raise DimensionError(f"map {k} does not connect stage {k} to stage {k + 1}")
        lim = cls(EXPLICIT_CHAIN, len(stages) - 1)
        lim._stages.extend(stages)
        lim._maps.extend(maps)
        return lim

    # -- stage construction -------------------------------------------------

    def _build_stage(self, k: int) -> FpModule:
        if self.family == PRUFER:
            return cyclic_module(self.params["p"] ** k)
        if self.family == CYCLIC_SUM:
            return finite_abelian(*self.params["orders"][: k + 1])
        if self.family == FROM_CHAIN:
            assert self.chain is not None
            return free_realization(self.chain.alphas[k]).module
        raise StageOutOfRangeError(f"explicit chain has no stage {k}")

    def _build_map(self, source: FpModule, target: FpModule) -> FpHom:
        if self.family == PRUFER:
            matrix = IntMatrix.from_rows([[self.params["p"]]])
        else:
            matrix = IntMatrix.hstack(
                IntMatrix.identity(source.num_gens),
                IntMatrix.zeros(source.num_gens, target.num_gens - source.num_gens),
            )
        return check_hom(source, target, matrix)

    def _ensure(self, k: int) -> None:
        if not 0 <= k <= self.budget:
            raise StageOutOfRangeError(f"stage {k} outside 0..{self.budget}")
        if k < len(self._stages):
            return
        with self._lock:
            while len(self._stages) <= k:
                i = len(self._stages)
                built = self._build_stage(i)
                # the map into stage i is published before the stage itself
                if i > 0:
                    self._maps.append(self._build_map(self._stages[i - 1], built))
                self._stages.append(built)
                logger.debug(f"{self.family}: built stage {i} = {built.describe()}")

    # -- access -------------------------------------------------------------

    def stage(self, k: int) -> FpModule:
        self._ensure(k)
        return self._stages[k]

    def connecting_map(self, k: int) -> FpHom:
        """``g_k: M_k -> M_(k+1)``."""
        self._ensure(k + 1)
        return self._maps[k]

    def transition(self, i: int, j: int) -> FpHom:
        """Composite ``M_i -> M_j`` for ``i <= j``."""
        if i > j:
            raise StageOutOfRangeError(f"no map from stage {i} back to stage {j}")
        result = identity_hom(self.stage(i))
        for k in range(i, j):
            result = compose(result, self.connecting_map(k))
        return result

    def push(self, t: ModuleTuple, i: int, j: int) -> ModuleTuple:
        """Image in ``M_j`` of a tuple living in ``M_i``."""
        current = t
        for k in range(i, j):
            current = self.connecting_map(k).apply_tuple(current)
        return current

    def tail(self, t: ModuleTuple, start: int, stop: Optional[int] = None) -> list[ModuleTuple]:
        """``[t, g(t), g(g(t)), ...]`` from stage ``start`` through ``stop``."""
        stop = self.budget if stop is None else stop
        self._ensure(stop)
        tuples = [t]
        for k in range(start, stop):
            tuples.append(self.connecting_map(k).apply_tuple(tuples[-1]))
        return tuples

    def cached_stage_count(self) -> int:
        return len(self._stages)

    def materialize(self, upto: Optional[int] = None) -> None:
        self._ensure(self.budget if upto is None else upto)

    def canonical_tuple(self, k: int) -> ModuleTuple:
        """Generators of ``M_k`` as a tuple."""
        return ModuleTuple.generators(self.stage(k))


# ============================================================================
# TAILS AND STABILIZATION
# ============================================================================

@dataclass(frozen=True)
class StabilizationVerdict:
    """Outcome of scanning a tail.

    When ``stabilized``, ``stage`` and ``formula`` name where it happened and
    ``chain`` lists every computed generator. Otherwise ``chain`` is strictly
    descending under the test class, one entry per distinct class, with the
    stage each entry first appeared at in ``chain_stages``.
    """

    stabilized: bool
    stage: Optional[int]
    formula: Optional[PpFormula]
    chain: tuple[PpFormula, ...]
    chain_stages: tuple[int, ...]
    test_class: TestClass
    budget_used: int


def tail_generators(lim: OmegaLimit, start: int, t: ModuleTuple, stop: int) -> list[PpFormula]:
    return [
        pp_type_generator(PointedModule(u.module, u))
        for u in lim.tail(t, start, stop)
    ]


def tail_stabilization(
    lim: OmegaLimit,
    start: int,
    t: ModuleTuple,
    test_class: TestClass,
    budget: Optional[int] = None,
) -> StabilizationVerdict:
    """Least stage from which the tail's type generators stay ``L``-equivalent.

    The generators descend along the tail, so stage ``j`` stabilizes exactly
    when its generator ``L``-implies the last computed one. A match only at
    the last stage is reported as not stabilized: the budget ran out before
    the scan could confirm anything.

    Raises:
        StageOutOfRangeError: ``start`` or ``budget`` lies outside the limit
    """
    budget = lim.budget if budget is None else budget
    if budget > lim.budget:
        raise StageOutOfRangeError(f"budget {budget} exceeds the limit budget {lim.budget}")
    if not 0 <= start <= budget:
        raise StageOutOfRangeError(f"start stage {start} outside 0..{budget}")
    if t.module != lim.stage(start):
        raise DimensionError(f"tuple does not live in stage {start}")

    logger.info(f"🔍 Scanning tail from stage {start} to {budget} ({test_class})")
    phis = tail_generators(lim, start, t, budget)
    last = phis[-1]
    for offset, phi in enumerate(phis):
        if implies(phi, last, test_class).holds:
            break
    stage = start + offset
    if stage < budget or budget == start:
        logger.info(f"   ✓ stabilized at stage {stage}")
        return StabilizationVerdict(
            True, stage, phis[offset], tuple(phis), tuple(range(start, budget + 1)),
            test_class, budget,
        )

    chain = [phis[0]]
    stages = [start]
    for offset, phi in enumerate(phis[1:], start=1):
        if not implies(chain[-1], phi, test_class).holds:
            chain.append(phi)
            stages.append(start + offset)
    logger.info(f"   ✗ not stabilized within budget; {len(chain)} distinct generators")
    return StabilizationVerdict(False, None, None, tuple(chain), tuple(stages), test_class, budget)


def check_stabilization(verdict: StabilizationVerdict) -> list[str]:
    """Problems with a verdict's own invariants; empty when consistent."""
    problems = []
    L = verdict.test_class
    if verdict.stabilized:
        assert verdict.formula is not None and verdict.stage is not None
        first = verdict.chain_stages[0]
        for k, phi in zip(verdict.chain_stages, verdict.chain):
            if k >= verdict.stage and not equivalent(verdict.formula, phi, L):
                problems.append(f"stage {k} generator is not {L}-equivalent to the stable one")
        if verdict.stage < first:
            problems.append(f"stable stage {verdict.stage} precedes the first scanned stage {first}")
    else:
        for i in range(len(verdict.chain) - 1):
            upper, lower = verdict.chain[i], verdict.chain[i + 1]
            if not implies(lower, upper, L).holds or implies(upper, lower, L).holds:
                problems.append(f"chain entries {i} and {i + 1} are not strictly descending")
    return problems


@dataclass(frozen=True)
class ImagePurityReport:
    """Per stage ``i``: whether ``g_(i+1)`` is pure on the image of ``g_i``."""

    test_class: TestClass
    stages: tuple[tuple[int, bool], ...]

    @property
    def holds(self) -> bool:
        return all(ok for _, ok in self.stages)

    def failing(self) -> list[int]:
        return [i for i, ok in self.stages if not ok]


def pure_on_images(lim: OmegaLimit, test_class: TestClass, budget: Optional[int] = None) -> ImagePurityReport:
    """Check that every ``g_(i+1)`` preserves, up to ``L``, the types of the image of ``g_i``.

    The image of ``g_i`` is generated by the pushed generators of ``M_i``, so
    comparing the generator formulas of that one tuple before and after
    ``g_(i+1)`` covers every tuple of the image.
    """
    budget = lim.budget if budget is None else budget
    results = []
    for i in range(budget - 1):
        image = lim.push(lim.canonical_tuple(i), i, i + 1)
        pushed = lim.connecting_map(i + 1).apply_tuple(image)
        before = pp_type_generator(PointedModule(image.module, image))
        after = pp_type_generator(PointedModule(pushed.module, pushed))
        results.append((i, implies(before, after, test_class).holds))
    return ImagePurityReport(test_class, tuple(results))


def family_description(lim: OmegaLimit) -> str:
    describe: dict[str, Callable[[], str]] = {
        PRUFER: lambda: f"prufer(p={lim.params['p']})",
        CYCLIC_SUM: lambda: f"cyclic_sum({lim.params['orders']})",
        FROM_CHAIN: lambda: "from_chain",
        EXPLICIT_CHAIN: lambda: "explicit",
    }
    return f"{describe[lim.family]()} budget={lim.budget}"
