"""
Relative purity, atomicity and separation for finitely presented modules.

Every tuple of a finitely presented module has a pp type generated by one
formula (``pp_type_generator``). The checks here compare such generators
through ``implies``: a tuple's type grows along homomorphisms, so a map or an
inclusion is ``L``-pure on a tuple exactly when the generator before the map
``L``-implies the generator after it.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ppcalc.config import Settings, load_settings
from ppcalc.errors import BudgetExhaustedError, DimensionError, NotSurjectiveError
from ppcalc.formulas import (
    PointedModule,
    PpFormula,
    find_witness,
    pp_type_generator,
    qf_formula,
    qf_type_formula,
    satisfies,
)
from ppcalc.implication import TestClass, implies
from ppcalc.linalg import IntMatrix, Lattice, Vector, lattice_equals, solve_rows
from ppcalc.modules import (
    FpHom,
    FpModule,
    ModuleTuple,
    relation_lattice_of,
    span_lattice,
)

logger = logging.getLogger(__name__)

PURITY_NOTE = (
    "the pp types of the generating tuple in the submodule and in the module are "
    "generated by the two formulas, so purity reduces to one implication between them"
)


# ============================================================================
# PURITY AND ATOMICITY
# ============================================================================

@dataclass(frozen=True)
class PurityCertificate:
    holds: bool
    submodule_formula: PpFormula
    module_formula: PpFormula
    test_class: TestClass
    witness_module: Optional[FpModule]
    witness_tuple: Optional[ModuleTuple]
    note: str = PURITY_NOTE


def is_pure(m: FpModule, gens: ModuleTuple, test_class: TestClass) -> PurityCertificate:
    """Whether ``<gens>`` is an ``L``-pure submodule of ``m``.

    The submodule's own type of ``gens`` is generated by its relations (a
    quantifier-free formula), the module's type by ``pp_type_generator``.
    """
    if gens.module != m:
        raise DimensionError("generators do not live in the module")
    inside = qf_type_formula(PointedModule(m, gens))
    outside = pp_type_generator(PointedModule(m, gens))
    verdict = implies(inside, outside, test_class)
    witness = verdict.witness
    return PurityCertificate(
        verdict.holds,
        inside,
        outside,
        test_class,
        witness.module if witness else None,
        witness.tuple if witness else None,
    )


def atomicity_certificate(m: FpModule, t: ModuleTuple, test_class: TestClass) -> PpFormula:
    """A formula ``L``-generating the pp type of ``t``.

    Finitely presented modules are atomic for every class, so the absolute
    generator serves for all of them.
    """
    if t.module != m:
        raise DimensionError("tuple does not live in the module")
    return pp_type_generator(PointedModule(m, t))


def verify_atomicity(
    t: ModuleTuple,
    formula: PpFormula,
    samples: Iterable[PpFormula],
    test_class: TestClass,
) -> list[str]:
    """Problems with ``formula`` as an ``L``-generator of the type of ``t``.

    Checks that ``t`` satisfies ``formula`` and that ``formula`` ``L``-implies
    every sampled formula ``t`` satisfies.
    """
    problems = []
    if not satisfies(formula, t):
        problems.append("the tuple does not satisfy the certificate formula")
    for index, psi in enumerate(samples):
        if psi.n != t.arity or not satisfies(psi, t):
            continue
        if not implies(formula, psi, test_class).holds:
            problems.append(f"sample {index} is in the type but not {test_class}-implied")
    return problems


@dataclass(frozen=True)
class TorsionCertificate:
    holds: bool
    shortcut_applied: bool
    exponent: int
    certificates: tuple[tuple[int, PpFormula], ...]


def torsion_sharp_ml(m: FpModule) -> TorsionCertificate:
    """Per generator, a formula flat-generating its type.

    For torsion modules the formula is ``s x = 0`` with ``s`` the exponent; it
    flat-implies the generator's full type. Modules with free rank fall back
    to the absolute type generators and report the shortcut as not applied.
    """
    flat = TestClass.flat()
    shortcut = m.is_torsion()
    s = m.exponent()
    certificates = []
    holds = True
    for g in range(m.num_gens):
        t = ModuleTuple.of(m, [m.generator(g)])
        generator = pp_type_generator(PointedModule(m, t))
        if shortcut:
            formula = qf_formula(IntMatrix.from_rows([[s]], 1))
            holds = holds and satisfies(formula, t) and implies(formula, generator, flat).holds
        else:
            formula = generator
        certificates.append((g, formula))
    logger.debug(f"torsion shortcut {'applied' if shortcut else 'not applied'} for {m.describe()}")
    return TorsionCertificate(holds, shortcut, s, tuple(certificates))


# ============================================================================
# SEPARATION AND QUANTIFIER-FREE GENERATION
# ============================================================================

@dataclass(frozen=True)
class SeparationResult:
    gens: ModuleTuple
    certificate: PurityCertificate
    rounds: int


def _adjoin_new(current: ModuleTuple, candidates: Sequence[Sequence[int]]) -> ModuleTuple:
    span = span_lattice(current)
    fresh = []
    for row in candidates:
        if not span.contains_vector(row):
            fresh.append(row)
            span = Lattice.from_generators(span.ambient_dim, span.generators + (tuple(row),))
    if not fresh:
        return current
    return current.concat(ModuleTuple.of(current.module, fresh))


def separate_pure(
    m: FpModule,
    c: ModuleTuple,
    test_class: TestClass,
    budget: Optional[int] = None,
) -> SeparationResult:
    """Close ``c`` under witnesses until the generated submodule is ``L``-pure.

    Each round adjoins the HNF-reduced witness of the tuple's type generator.
    When that adds nothing new, the module generators serving as the
    canonical witness are adjoined instead.

    Raises:
        BudgetExhaustedError: still not pure after ``budget`` rounds;
            ``partial`` holds the tuple reached
    """
    rounds_left = load_settings(budget=budget).budget
    current = c
    rounds = 0
    while True:
        certificate = is_pure(m, current, test_class)
        if certificate.holds:
            logger.info(f"✓ {test_class}-pure after {rounds} round(s), {current.arity} generator(s)")
            return SeparationResult(current, certificate, rounds)
        if rounds == rounds_left:
            raise BudgetExhaustedError(
                f"no {test_class}-pure submodule found within {rounds_left} round(s)",
                partial=current,
            )
        rounds += 1
        generator = pp_type_generator(PointedModule(m, current))
        witness = find_witness(generator, current)
        assert witness is not None
        grown = _adjoin_new(current, witness.coords.entries)
        if grown == current:
            grown = _adjoin_new(current, IntMatrix.identity(m.num_gens).entries)
        logger.debug(f"round {rounds}: {current.arity} -> {grown.arity} generators")
        current = grown


@dataclass(frozen=True)
class QfExtension:
    extended: ModuleTuple
    qf_generator: PpFormula
    certified: bool


def qf_generated_extension(m: FpModule, c: ModuleTuple) -> QfExtension:
    """Extend ``c`` by module generators until it generates ``m``.

    The extended tuple's quantifier-free type then generates its whole pp
    type; ``certified`` records that implication.
    """
    extended = _adjoin_new(c, IntMatrix.identity(m.num_gens).entries)
    pointed = PointedModule(m, extended)
    qf = qf_type_formula(pointed)
    certified = implies(qf, pp_type_generator(pointed), TestClass.absolute()).holds
    return QfExtension(extended, qf, certified)


# ============================================================================
# MAPS
# ============================================================================

@dataclass(frozen=True)
class PreimageCheck:
    target: ModuleTuple
    preimage: Optional[ModuleTuple]
    candidates_tried: int


@dataclass(frozen=True)
class UniformEpiReport:
    """Result of the partial uniform-purity check; covers the listed tuples only."""

    test_class: TestClass
    checks: tuple[PreimageCheck, ...]
    coefficient_bound: int

    @property
    def holds(self) -> bool:
        return all(c.preimage is not None for c in self.checks)


def _kernel_coefficients(order: int, bound: int) -> list[int]:
    """Every residue of a finite-order kernel generator, else ``0, 1, -1, ...`` up to ``bound - 1``."""
    if order:
        return list(range(order))
    return [0] + [c for k in range(1, bound) for c in (k, -k)]


def _entry_preimages(h: FpHom, entry: Sequence[int], bound: int, limit: int) -> list[Vector]:
    """Up to ``limit`` representatives of ``h^-1(entry)``: a particular one plus kernel combinations."""
    k = h.source.num_gens
    solved = solve_rows(IntMatrix.vstack(h.matrix, h.target.relation_matrix), entry)
    if solved is None:
        return []
    particular = solved[0][:k]
    kernel = [g for g in h.kernel_lattice().generators if not h.source.is_zero_element(g)]
    ranges = [_kernel_coefficients(h.source.element_order(g), bound) for g in kernel]
    results: list[Vector] = []
    seen = set()
    for coeffs in itertools.product(*ranges):
        v = list(particular)
        for c, g in zip(coeffs, kernel):
            v = [a + c * b for a, b in zip(v, g)]
        reduced = h.source.reduce_vector(v)
        if reduced not in seen:
            seen.add(reduced)
            results.append(reduced)
            if len(results) >= limit:
                break
    return results


def uniform_pure_epi_check(
    h: FpHom,
    test_class: TestClass,
    extra_tuples: Sequence[ModuleTuple] = (),
    settings: Optional[Settings] = None,
) -> UniformEpiReport:
    """Search ``L``-pure preimages for the target generators and each extra tuple.

    Preimages range over kernel-coset representatives. A kernel generator of
    finite order contributes each of its residues; one of infinite order
    contributes coefficients of absolute value below the larger of the
    source's biggest invariant factor and ``settings.preimage_bound``, smallest
    first. At most ``settings.max_preimage_candidates`` representatives are
    kept per entry and tried per target tuple.

    Raises:
        NotSurjectiveError: the map misses part of its target
    """
    settings = settings or load_settings()
    if not h.is_surjective():
        raise NotSurjectiveError("map is not surjective; uniform purity needs an epimorphism")
    largest = max(h.source.torsion_factors, default=0)
    bound = max(largest, settings.preimage_bound, 1)
    targets = [ModuleTuple.generators(h.target), *extra_tuples]
    checks = []
    for t in targets:
        if t.module != h.target:
            raise DimensionError("extra tuple does not live in the target")
        goal = pp_type_generator(PointedModule(h.target, t))
        per_entry = [
            _entry_preimages(h, row, bound, settings.max_preimage_candidates)
            for row in t.coords.entries
        ]
        found = None
        tried = 0
        for combo in itertools.islice(itertools.product(*per_entry), settings.max_preimage_candidates):
            tried += 1
            candidate = ModuleTuple.of(h.source, combo)
            if implies(pp_type_generator(PointedModule(h.source, candidate)), goal, test_class).holds:
                found = candidate
                break
        logger.debug(f"tuple of arity {t.arity}: {'found' if found else 'no'} pure preimage after {tried} candidate(s)")
        checks.append(PreimageCheck(t, found, tried))
    return UniformEpiReport(test_class, tuple(checks), bound)


@dataclass(frozen=True)
class QfPreservation:
    preserved: bool
    mismatches: tuple[int, ...]


def qf_parts_preserved(h: FpHom, tuples: Sequence[ModuleTuple]) -> QfPreservation:
    """Whether ``h`` keeps the quantifier-free type of each tuple unchanged."""
    mismatches = []
    for i, t in enumerate(tuples):
        before = relation_lattice_of(t)
        after = relation_lattice_of(h.apply_tuple(t))
        if not lattice_equals(before, after):
            mismatches.append(i)
    return QfPreservation(not mismatches, tuple(mismatches))


def pure_on_tuple(h: FpHom, t: ModuleTuple, test_class: TestClass) -> bool:
    """Whether ``h`` preserves the type of ``t`` up to ``L``."""
    before = pp_type_generator(PointedModule(h.source, t))
    after = pp_type_generator(PointedModule(h.target, h.apply_tuple(t)))
    return implies(before, after, test_class).holds
