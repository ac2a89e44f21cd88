"""
L-chains and the limits built from them.

An ``LChain`` splits its variables into blocks ``x_0, x_1, ...``. Formula
``alphas[i]`` is quantifier-free over blocks ``0 .. i+1`` and
``phis[i] = E x_(i+1) alphas[i]`` is over blocks ``0 .. i``. The chain is
verified for a test class ``L`` when each ``alphas[i+1]`` implies
``alphas[i]`` and quantifying the last block out of ``phis[i+1]`` gives a
formula ``L``-equivalent to ``phis[i]``.
"""
import logging
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterator, Optional, Sequence, Union

from ppcalc.errors import (
    BudgetExhaustedError,
    ChainNotVerifiedError,
    DimensionError,
    MalformedChainError,
    StageOutOfRangeError,
)
from ppcalc.formulas import (
    PointedModule,
    PpFormula,
    exists_prefix,
    pad,
    pp_type_generator,
    qf_formula,
    qf_type_formula,
    top,
)
from ppcalc.implication import TestClass, equivalent, implies, implies_absolute
from ppcalc.linalg import IntMatrix
from ppcalc.limits import PRUFER, OmegaLimit
from ppcalc.modules import FpHom, FpModule, ModuleTuple, check_hom, compose

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LChain:
    blocks: tuple[int, ...]
    alphas: tuple[PpFormula, ...]
    verified_for: frozenset[TestClass] = field(default_factory=frozenset)
    realization: Optional[ModuleTuple] = None

    def __post_init__(self) -> None:
        problems = find_chain_problems(self.blocks, self.alphas)
        if problems:
            raise MalformedChainError("; ".join(problems))

    @property
    def length(self) -> int:
        return len(self.alphas)

    def offset(self, block: int) -> int:
        """Number of variables in blocks ``0 .. block-1``."""
        return sum(self.blocks[:block])

    @property
    def phis(self) -> tuple[PpFormula, ...]:
        return tuple(exists_prefix(a, self.offset(i + 1)) for i, a in enumerate(self.alphas))

    def is_verified(self, test_class: Optional[TestClass] = None) -> bool:
        if test_class is None:
            return bool(self.verified_for)
        return test_class in self.verified_for


def find_chain_problems(blocks: Sequence[int], alphas: Sequence[PpFormula]) -> list[str]:
    problems = []
    if not alphas:
        problems.append("a chain needs at least one formula")
    if any(b < 0 for b in blocks):
        problems.append(f"negative block length in {list(blocks)}")
    if len(blocks) != len(alphas) + 1:
        problems.append(f"{len(alphas)} formulas need {len(alphas) + 1} blocks, got {len(blocks)}")
        return problems
    for i, alpha in enumerate(alphas):
        expected = sum(blocks[: i + 2])
        if not alpha.is_quantifier_free():
            problems.append(f"alphas[{i}] is not quantifier-free")
        if alpha.n != expected:
            problems.append(f"alphas[{i}] has {alpha.n} variables, blocks 0..{i + 1} have {expected}")
    return problems


# ============================================================================
# VERIFICATION
# ============================================================================

@dataclass(frozen=True)
class ChainVerification:
    holds: bool
    failing_index: Optional[int]
    failing_indices: tuple[int, ...]
    chain: LChain
    test_class: TestClass

    def __iter__(self) -> Iterator[Any]:
        yield self.holds
        yield self.failing_index


def verify_l_chain(c: LChain, test_class: TestClass) -> ChainVerification:
    """Check descent and the step-to-step ``L``-equivalences of the projections."""
    phis = c.phis
    failing = []
    for i in range(c.length - 1):
        lower = c.alphas[i + 1]
        upper = pad(c.alphas[i], lower.n)
        if not implies_absolute(lower, upper):
            logger.debug(f"alphas[{i + 1}] does not imply alphas[{i}]")
            failing.append(i)
            continue
        projected = exists_prefix(phis[i + 1], c.offset(i + 1))
        if not equivalent(projected, phis[i], test_class):
            logger.debug(f"projection of phis[{i + 1}] is not {test_class}-equivalent to phis[{i}]")
            failing.append(i)
    holds = not failing
    chain = replace(c, verified_for=c.verified_for | {test_class}) if holds else c
    logger.info(
        f"{'✓' if holds else '✗'} chain of length {c.length} "
        f"{'is' if holds else 'is not'} a {test_class}-chain"
    )
    return ChainVerification(holds, failing[0] if failing else None, tuple(failing), chain, test_class)


# ============================================================================
# BUILT-IN CHAINS
# ============================================================================

def prufer_alpha(p: int, length: int) -> PpFormula:
    """``p x_1 = 0 & x_1 = p x_2 & ... & x_(l-1) = p x_l`` in ``length`` variables.

    Its free realization is ``Z/p^length`` with the tuple
    ``(p^(l-1) c, ..., p c, c)``.
    """
    if length < 1:
        raise DimensionError("a Prufer formula needs at least one variable")
    rows = [[p] + [0] * (length - 1)]
    for j in range(length - 1):
        row = [0] * length
        row[j], row[j + 1] = 1, -p
        rows.append(row)
    return qf_formula(IntMatrix.from_rows(rows, length))


def prufer_chain(p: int, length: int) -> LChain:
    """Chain with one-variable blocks and ``alphas[k] = prufer_alpha(p, k + 2)``.

    Stage ``k`` of its limit is ``Z/p^(k+2)``.
    """
    alphas = tuple(prufer_alpha(p, k + 2) for k in range(length))
    return LChain((1,) * (length + 1), alphas)


def tau_alpha(orders: Sequence[int]) -> PpFormula:
    """``r_0 x_0 = 0 & ... & r_l x_l = 0``."""
    return qf_formula(IntMatrix.diagonal(list(orders)))


def tau_chain(orders: Sequence[int]) -> LChain:
    """Chain with one-variable blocks and ``alphas[i]`` annihilating ``x_j`` by ``r_j`` for ``j <= i+1``."""
    if len(orders) < 2:
        raise MalformedChainError("a tau chain needs at least two orders")
    alphas = tuple(tau_alpha(orders[: i + 2]) for i in range(len(orders) - 1))
    return LChain((1,) * len(orders), alphas)


# ============================================================================
# LIMITS OF CHAINS
# ============================================================================

def build_m_phi(c: LChain, budget: Optional[int] = None, test_class: Optional[TestClass] = None) -> OmegaLimit:
    """Limit whose stage ``i`` is the free realization of ``alphas[i]``.

    Raises:
        ChainNotVerifiedError: the chain has not passed ``verify_l_chain``
            (for ``test_class`` when given)
    """
    if not c.is_verified(test_class):
        wanted = f" for {test_class}" if test_class else ""
        raise ChainNotVerifiedError(f"chain must be verified{wanted} before building its limit")
    return OmegaLimit.from_chain(c, budget)


def block_tuple(lim: OmegaLimit, stage: int, blocks: int) -> ModuleTuple:
    """Canonical tuples of blocks ``0 .. blocks-1`` at ``stage``."""
    assert lim.chain is not None
    return lim.canonical_tuple(stage).prefix(lim.chain.offset(blocks))


def _require_chain_limit(lim: OmegaLimit, stage: int, prefix: int) -> LChain:
    if lim.chain is None:
        raise DimensionError("limit was not built from a chain")
    if not 0 <= prefix <= stage <= lim.budget:
        raise StageOutOfRangeError(f"need 0 <= prefix {prefix} <= stage {stage} <= {lim.budget}")
    return lim.chain


def chain_stage_types(lim: OmegaLimit, stage: int, prefix: int) -> PpFormula:
    """Type generator of the canonical tuples of blocks ``0 .. prefix`` at ``stage``."""
    _require_chain_limit(lim, stage, prefix)
    t = block_tuple(lim, stage, prefix + 1)
    return pp_type_generator(PointedModule(t.module, t))


@dataclass(frozen=True)
class StageTypeReport:
    stage: int
    prefix: int
    formula: PpFormula
    projection: PpFormula
    matches_projection: bool
    matches_phi: dict[str, bool]


def stage_type_report(lim: OmegaLimit, stage: int, prefix: int) -> StageTypeReport:
    """Compare ``chain_stage_types`` with the projected chain formula and ``phis[prefix]``."""
    chain = _require_chain_limit(lim, stage, prefix)
    formula = chain_stage_types(lim, stage, prefix)
    projection = exists_prefix(chain.alphas[stage], chain.offset(prefix + 1))
    matches = equivalent(formula, projection, TestClass.absolute())
    phi = chain.phis[prefix]
    per_class = {str(L): equivalent(formula, phi, L) for L in sorted(chain.verified_for, key=str)}
    return StageTypeReport(stage, prefix, formula, projection, matches, per_class)


# ============================================================================
# ARRANGING GENERATORS
# ============================================================================

def _components(m: FpModule) -> list[set[int]]:
    """Generator indices grouped by the supports of the relators."""
    parent = list(range(m.num_gens))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for row in m.relations.generators:
        support = [j for j, v in enumerate(row) if v]
        for j in support[1:]:
            parent[find(j)] = find(support[0])
    groups: dict[int, set[int]] = {}
    for i in range(m.num_gens):
        groups.setdefault(find(i), set()).add(i)
    return list(groups.values())


def arrange_l_chain(
    m: FpModule,
    generator_order: Optional[Sequence[int]] = None,
    test_class: Optional[TestClass] = None,
) -> LChain:
    """Arrange the generators of ``m`` into tuples realizing a chain.

    Block 0 is the first generator. Each later block holds the generators
    needed as witnesses for what is already listed, followed by the next
    unlisted generator. The witnesses are taken as whole generators: every
    generator sharing a relator component with a listed one. A component's
    generators are a witness tuple for the type generator of any of its
    elements, so this closure stands in for solving for the least witness
    elements. Blocks then stay made of generators, and the realization tuple
    is the generator tuple itself, at the price of coarser blocks.

    ``alphas[i]`` is the full quantifier-free type of the listed generators.
    Blocks ``0 .. i+1`` are the component closure of blocks ``0 .. i`` plus
    one generator from a fresh component, so ``phis[i]`` generates the pp
    type of blocks ``0 .. i`` in ``m`` absolutely and the chain is a chain
    for every test class. The result carries the generator tuple as
    ``realization`` and is verified for ``test_class`` (absolute by default).
    """
    order = list(range(m.num_gens)) if generator_order is None else list(generator_order)
    if sorted(order) != list(range(m.num_gens)):
        raise DimensionError(f"{order} is not a permutation of the {m.num_gens} generators")
    test_class = test_class or TestClass.absolute()
    if not order:
        chain = LChain((0, 0), (top(0),), realization=ModuleTuple.empty(m))
        return verify_l_chain(chain, test_class).chain

    component_of = {g: comp for comp in _components(m) for g in comp}
    rank = {g: i for i, g in enumerate(order)}
    blocks = [[order[0]]]
    listed = {order[0]}
    alphas = []
    while True:
        touched = set().union(*(component_of[g] for g in listed))
        needed = sorted(touched - listed, key=rank.__getitem__)
        rest = [g for g in order if g not in listed and g not in touched]
        block = needed + rest[:1]
        blocks.append(block)
        listed.update(block)
        flat = [g for b in blocks for g in b]
        t = ModuleTuple.of(m, [m.generator(g) for g in flat])
        alphas.append(qf_type_formula(PointedModule(m, t)))
        logger.debug(f"block {len(blocks) - 1}: generators {block}")
        if len(listed) == m.num_gens:
            break
    chain = LChain(tuple(len(b) for b in blocks), tuple(alphas), realization=t)
    logger.info(f"Arranged {m.num_gens} generators into {chain.length} chain step(s)")
    return verify_l_chain(chain, test_class).chain


# ============================================================================
# PURE-IMAGE REALIZATION
# ============================================================================

@dataclass(frozen=True)
class StageCheck:
    stage: int
    target_stage: Optional[int]
    surjective: bool
    pure_on_generators: bool
    injective: bool


@dataclass(frozen=True)
class RealizationReport:
    test_class: TestClass
    stages: tuple[StageCheck, ...]
    compatible: bool
    final_isomorphism: bool

    @property
    def surjective(self) -> bool:
        return self.stages[-1].surjective

    @property
    def pure_on_generators(self) -> bool:
        return all(s.pure_on_generators for s in self.stages)

    def find_problems(self) -> list[str]:
        problems = []
        if not self.compatible:
            problems.append("stage maps do not commute with the connecting maps")
        for s in self.stages:
            if not s.pure_on_generators:
                problems.append(f"stage {s.stage}: not {self.test_class}-pure on generators")
            if not s.injective and self.test_class.special_assumption():
                problems.append(f"stage {s.stage}: not injective although purity forces it")
        return problems


@dataclass(frozen=True)
class PureImageRealization:
    chain: LChain
    limit: OmegaLimit
    maps: tuple[FpHom, ...]
    report: RealizationReport


# stage i of the chain limit -> (target stage or None for a plain module, image tuple)
Assignment = Callable[[int], tuple[Optional[int], ModuleTuple]]


def prufer_tau_assignment(lim: OmegaLimit) -> Assignment:
    """Stage ``i`` of the tau chain goes to Prufer stage ``i+2`` with ``x_j -> p^(i+1-j) c``."""
    p = lim.params["p"]

    def assign(i: int) -> tuple[Optional[int], ModuleTuple]:
        target = lim.stage(i + 2)
        return i + 2, ModuleTuple.of(target, [[p ** (i + 1 - j)] for j in range(i + 2)])

    return assign


def prufer_tau_realization(lim: OmegaLimit) -> tuple[LChain, Assignment]:
    """Tau chain with ``r_j = p^(j+1)`` mapped onto a Prufer family."""
    if lim.family != PRUFER:
        raise DimensionError("tau realization applies to the Prufer family")
    p = lim.params["p"]
    if lim.budget < 2:
        raise BudgetExhaustedError(f"Prufer budget {lim.budget} leaves no stage for the tau chain")
    chain = tau_chain([p ** (j + 1) for j in range(lim.budget)])
    return chain, prufer_tau_assignment(lim)


def _realization_assignment(chain: LChain) -> Assignment:
    """Stage ``i`` goes to the prefix of the chain's own realization tuple."""
    realized = chain.realization
    if realized is None:
        raise DimensionError("chain carries no realization in the target module")

    def assign(i: int) -> tuple[Optional[int], ModuleTuple]:
        return None, realized.prefix(chain.offset(i + 2))

    return assign


def arrange_limit_chain(
    lim: OmegaLimit, budget: Optional[int] = None, test_class: Optional[TestClass] = None
) -> tuple[LChain, Assignment]:
    """Arrange a limit stage by stage into a chain mapping stage ``i`` onto stage ``i``.

    Block 0 is empty and block ``j+1`` holds the generators of stage ``j``.
    The tuple at stage ``i`` lists the generators of every earlier stage,
    pushed forward along the connecting maps, followed by the generators of
    stage ``i``; ``alphas[i]`` is its full quantifier-free type. Since that
    tuple generates stage ``i``, each stage of the chain limit is isomorphic
    to the matching stage of ``lim`` and the chain's connecting maps follow
    the limit's. The chain is verified for ``test_class`` (absolute by
    default); it passes exactly when the pushed tuples keep their types up
    to the class along the connecting maps.

    Raises:
        StageOutOfRangeError: ``budget`` exceeds the limit's budget
    """
    budget = lim.budget if budget is None else budget
    lim.materialize(budget)
    tuples = [lim.canonical_tuple(0)]
    for i in range(budget):
        pushed = lim.connecting_map(i).apply_tuple(tuples[-1])
        tuples.append(pushed.concat(lim.canonical_tuple(i + 1)))
    alphas = tuple(qf_type_formula(PointedModule(t.module, t)) for t in tuples)
    blocks = (0, *(lim.stage(k).num_gens for k in range(budget + 1)))
    chain = verify_l_chain(LChain(blocks, alphas), test_class or TestClass.absolute()).chain
    logger.info(f"Arranged {budget + 1} limit stage(s) into a chain")

    def assign(i: int) -> tuple[Optional[int], ModuleTuple]:
        return i, tuples[i]

    return chain, assign


def _stage_check(
    h: FpHom, stage: int, target_stage: Optional[int], test_class: TestClass
) -> StageCheck:
    gens = ModuleTuple.generators(h.source)
    before = pp_type_generator(PointedModule(h.source, gens))
    after = pp_type_generator(PointedModule(h.target, h.apply_tuple(gens)))
    pure = implies(before, after, test_class).holds
    injective = h.is_injective()
    return StageCheck(stage, target_stage, h.is_surjective(), pure, injective)


def realize_as_pure_image(
    n: Union[FpModule, OmegaLimit],
    test_class: TestClass,
    budget: Optional[int] = None,
    chain: Optional[LChain] = None,
    assignment: Optional[Assignment] = None,
) -> PureImageRealization:
    """Exhibit ``n`` as the image of the limit of a chain, stage by stage.

    For a module the chain comes from ``arrange_l_chain`` and stage ``i`` maps
    its canonical variables to the arranged generators. For a Prufer family
    without an explicit chain the tau chain is used. Any other limit is
    arranged by ``arrange_limit_chain``, stage ``i`` going to stage ``i`` of
    ``n``, and the maps are checked against the connecting maps of ``n``.

    Raises:
        BudgetExhaustedError: the budget ends before every generator is used
        ChainNotVerifiedError: the chain arranged from a limit is not a chain
            for ``test_class``
    """
    if isinstance(n, FpModule):
        chain = chain or arrange_l_chain(n, test_class=test_class)
        assignment = assignment or _realization_assignment(chain)
        needed = chain.length - 1
        budget = needed if budget is None else budget
        if budget < needed:
            raise BudgetExhaustedError(
                f"budget {budget} ends before stage {needed} where all generators are used",
                partial=chain,
            )
        budget = needed
    else:
        if chain is None and n.family == PRUFER:
            chain, assignment = prufer_tau_realization(n)
        elif chain is None:
            chain, assignment = arrange_limit_chain(n, budget, test_class)
        if assignment is None:
            raise DimensionError("a chain over a limit needs a stage assignment")
        budget = chain.length - 1 if budget is None else min(budget, chain.length - 1)

    if not chain.is_verified(test_class):
        chain = verify_l_chain(chain, test_class).chain
    lim = build_m_phi(chain, budget)
    logger.info(f"🔍 Realizing {'a module' if isinstance(n, FpModule) else 'a limit'} over {budget + 1} stage(s)")

    maps: list[FpHom] = []
    targets: list[Optional[int]] = []
    checks: list[StageCheck] = []
    for i in range(budget + 1):
        target_stage, images = assignment(i)
        h = check_hom(lim.stage(i), images.module, images.coords)
        maps.append(h)
        targets.append(target_stage)
        checks.append(_stage_check(h, i, target_stage, test_class))

    compatible = True
    for i in range(budget):
        via_next = compose(lim.connecting_map(i), maps[i + 1])
        direct = maps[i]
        source_stage, target_stage = targets[i], targets[i + 1]
        if isinstance(n, OmegaLimit) and source_stage is not None and target_stage is not None:
            direct = compose(direct, n.transition(source_stage, target_stage))
        gens = ModuleTuple.generators(lim.stage(i))
        if via_next.apply_tuple(gens) != direct.apply_tuple(gens):
            compatible = False
            logger.warning(f"stage {i}: maps do not commute")

    report = RealizationReport(test_class, tuple(checks), compatible, maps[-1].is_isomorphism())
    for s in checks:
        logger.info(
            f"   stage {s.stage}: surjective={s.surjective} "
            f"pure={s.pure_on_generators} injective={s.injective}"
        )
    return PureImageRealization(chain, lim, tuple(maps), report)
