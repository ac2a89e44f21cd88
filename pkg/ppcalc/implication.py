"""
Relative implication between pp formulas.

``implies(phi, psi, L)`` decides whether ``phi -> psi`` holds in every module
of the test class ``L``:

- absolute: all abelian groups. Decided in the free realization of ``phi``.
- flat: torsion-free groups. Decided in the regular module ``Z``.
- abspure: divisible groups. Decided through duality, as the flat
  implication between the duals in the opposite direction.
- explicit: the definable class generated by a finite list of finitely
  presented modules. Decided member by member.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional, Sequence

from ppcalc.errors import DimensionError, PpCalcError
from ppcalc.formulas import (
    PointedModule,
    PpFormula,
    dualize,
    evaluate,
    free_realization,
    pp_type_generator,
    satisfies,
)
from ppcalc.modules import FpModule, ModuleTuple, free_module

logger = logging.getLogger(__name__)

ABSOLUTE = "absolute"
FLAT = "flat"
ABSPURE = "abspure"
EXPLICIT = "explicit"


@dataclass(frozen=True)
class TestClass:
    """The class of modules implications are checked against."""

    __test__ = False  # keep pytest from collecting this class

    kind: str
    modules: tuple[FpModule, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.kind not in (ABSOLUTE, FLAT, ABSPURE, EXPLICIT):
            raise ValueError(f"unknown test class: {self.kind}")
        if self.kind == EXPLICIT and not self.modules:
            raise ValueError("an explicit test class needs at least one module")
        if self.kind != EXPLICIT and self.modules:
            raise ValueError(f"the {self.kind} class takes no module list")

    @classmethod
    def absolute(cls) -> "TestClass":
        return cls(ABSOLUTE)

    @classmethod
    def flat(cls) -> "TestClass":
        return cls(FLAT)

    @classmethod
    def abspure(cls) -> "TestClass":
        return cls(ABSPURE)

    @classmethod
    def explicit(cls, modules: Sequence[FpModule]) -> "TestClass":
        return cls(EXPLICIT, tuple(modules))

    @property
    def name(self) -> str:
        return self.kind

    def dual(self) -> "TestClass":
        """Definably dual class: flat and abspure swap, absolute is self-dual."""
        if self.kind == EXPLICIT:
            raise PpCalcError("explicit test classes have no computed dual")
        return {ABSOLUTE: self, FLAT: TestClass.abspure(), ABSPURE: TestClass.flat()}[self.kind]

    def special_assumption(self) -> bool:
        """Whether the regular module lies in the definable class of the dual.

        Holds for absolute (dual: all groups) and abspure (dual: flat groups).
        """
        return self.kind in (ABSOLUTE, ABSPURE)

    def __str__(self) -> str:
        if self.kind == EXPLICIT:
            return f"explicit[{', '.join(m.describe() for m in self.modules)}]"
        return self.kind


# ============================================================================
# VERDICTS
# ============================================================================

FREE_REALIZATION_COUNTEREXAMPLE = "free_realization_counterexample"
MEMBER_COUNTEREXAMPLE = "member_counterexample"
REGULAR_MODULE_COUNTEREXAMPLE = "regular_module_counterexample"
DUAL_DELEGATE = "dual_delegate"


@dataclass(frozen=True)
class ImplicationWitness:
    """A module and a tuple satisfying the premise but not the conclusion.

    For ``dual_delegate`` the module and tuple refute the dual implication.
    """

    kind: str
    module: Optional[FpModule] = None
    tuple: Optional[ModuleTuple] = None
    member_index: Optional[int] = None


@dataclass(frozen=True)
class ImplicationVerdict:
    holds: bool
    witness: Optional[ImplicationWitness]
    test_class: TestClass

    def __iter__(self) -> Iterator[Any]:
        yield self.holds
        yield self.witness


def _require_same_arity(phi: PpFormula, psi: PpFormula) -> None:
    if phi.n != psi.n:
        raise DimensionError(f"free arities {phi.n} and {psi.n} differ")


def _first_escape(phi: PpFormula, psi: PpFormula, module: FpModule) -> Optional[ModuleTuple]:
    """A generator of ``phi(M)`` outside ``psi(M)``, if any."""
    lower = evaluate(phi, module)
    upper = evaluate(psi, module)
    for t in lower.generators():
        if not upper.contains(t):
            return t
    return None


def _implies_absolute(phi: PpFormula, psi: PpFormula) -> tuple[bool, Optional[ImplicationWitness]]:
    realization = free_realization(phi)
    if satisfies(psi, realization.tuple):
        return True, None
    return False, ImplicationWitness(
        FREE_REALIZATION_COUNTEREXAMPLE, realization.module, realization.tuple
    )


def _implies_flat(phi: PpFormula, psi: PpFormula) -> tuple[bool, Optional[ImplicationWitness]]:
    regular = free_module(1)
    escape = _first_escape(phi, psi, regular)
    if escape is None:
        return True, None
    return False, ImplicationWitness(REGULAR_MODULE_COUNTEREXAMPLE, regular, escape)


def _implies_explicit(
    phi: PpFormula, psi: PpFormula, modules: Sequence[FpModule]
) -> tuple[bool, Optional[ImplicationWitness]]:
    for index, module in enumerate(modules):
        escape = _first_escape(phi, psi, module)
        if escape is not None:
            logger.debug(f"member {index} ({module.describe()}) refutes the implication")
            return False, ImplicationWitness(MEMBER_COUNTEREXAMPLE, module, escape, index)
    return True, None


def implies(phi: PpFormula, psi: PpFormula, test_class: TestClass) -> ImplicationVerdict:
    """Decide ``phi <=_L psi`` and return a concrete witness when it fails.

    Raises:
        DimensionError: the formulas have different free arities
    """
    _require_same_arity(phi, psi)
    if test_class.kind == ABSOLUTE:
        holds, witness = _implies_absolute(phi, psi)
    elif test_class.kind == FLAT:
        holds, witness = _implies_flat(phi, psi)
    elif test_class.kind == ABSPURE:
        holds, inner = _implies_flat(dualize(psi), dualize(phi))
        witness = None if inner is None else ImplicationWitness(DUAL_DELEGATE, inner.module, inner.tuple)
    else:
        holds, witness = _implies_explicit(phi, psi, test_class.modules)
    return ImplicationVerdict(holds, witness, test_class)


def implies_absolute(phi: PpFormula, psi: PpFormula) -> bool:
    return implies(phi, psi, TestClass.absolute()).holds


def equivalent(phi: PpFormula, psi: PpFormula, test_class: TestClass) -> bool:
    return implies(phi, psi, test_class).holds and implies(psi, phi, test_class).holds


def type_implies(p: PointedModule, q: PointedModule, test_class: TestClass) -> bool:
    """``pp(p) <=_L pp(q)`` for finitely generated types, through their generators."""
    return implies(pp_type_generator(p), pp_type_generator(q), test_class).holds


def strictly_implies(phi: PpFormula, psi: PpFormula, test_class: TestClass) -> bool:
    return implies(phi, psi, test_class).holds and not implies(psi, phi, test_class).holds
