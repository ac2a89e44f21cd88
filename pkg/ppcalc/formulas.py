"""
pp formulas over the integers.

A formula ``PpFormula(n, m, a, b)`` stands for ``E y (a x = b y)`` with ``n``
free variables ``x``, ``m`` bound variables ``y`` and one equation per row of
``a`` and ``b``. No rows means the formula that always holds; ``a = I`` with no
bound variables is ``x = 0``, the bottom of the lattice.

Evaluation in a module on ``k`` generators produces a lattice of flattened
tuples in ``Z^(n*k)``: entry ``j`` of a tuple occupies coordinates
``j*k .. j*k + k - 1``.
"""
import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from ppcalc.errors import DimensionError
from ppcalc.linalg import (
    IntMatrix,
    Lattice,
    Vector,
    lattice_contains,
    left_kernel,
    solve_rows,
)
from ppcalc.modules import (
    FpHom,
    FpModule,
    ModuleTuple,
    check_hom,
    present_module,
    relation_lattice_of,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PpFormula:
    n: int
    m: int
    a: IntMatrix
    b: IntMatrix

    def __post_init__(self) -> None:
        if self.a.cols != self.n or self.b.cols != self.m:
            raise DimensionError(
                f"blocks {self.a.shape} and {self.b.shape} do not fit n={self.n}, m={self.m}"
            )
        if self.a.rows != self.b.rows:
            raise DimensionError(f"blocks have {self.a.rows} and {self.b.rows} equations")

    @classmethod
    def build(cls, n: int, m: int, a_rows: Sequence[Sequence[int]], b_rows: Sequence[Sequence[int]]) -> "PpFormula":
        return cls(n, m, IntMatrix.from_rows(a_rows, n), IntMatrix.from_rows(b_rows, m))

    @property
    def equations(self) -> int:
        return self.a.rows

    @property
    def free_arity(self) -> int:
        return self.n

    @property
    def bound_arity(self) -> int:
        return self.m

    def is_quantifier_free(self) -> bool:
        return self.m == 0

    def is_top(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()


def top(n: int) -> PpFormula:
    return PpFormula(n, 0, IntMatrix.zeros(0, n), IntMatrix.zeros(0, 0))


def bottom(n: int) -> PpFormula:
    return PpFormula(n, 0, IntMatrix.identity(n), IntMatrix.zeros(n, 0))


def qf_formula(rows: IntMatrix) -> PpFormula:
    """Quantifier-free system ``rows . x = 0``."""
    return PpFormula(rows.cols, 0, rows, IntMatrix.zeros(rows.rows, 0))


def divisibility(r: int) -> PpFormula:
    """``r | x`` as ``E y (x = r y)``."""
    return PpFormula.build(1, 1, [[1]], [[r]])


def annihilation(r: int) -> PpFormula:
    """``r x = 0``."""
    return qf_formula(IntMatrix.from_rows([[r]], 1))


def _require_same_arity(phi: PpFormula, psi: PpFormula) -> None:
    if phi.n != psi.n:
        raise DimensionError(f"free arities {phi.n} and {psi.n} differ")


# ============================================================================
# LATTICE OPERATIONS AND SUBSTITUTION
# ============================================================================

def meet(phi: PpFormula, psi: PpFormula) -> PpFormula:
    """Conjunction with disjoint bound variables."""
    _require_same_arity(phi, psi)
    a = IntMatrix.vstack(phi.a, psi.a)
    b = IntMatrix.vstack(
        IntMatrix.hstack(phi.b, IntMatrix.zeros(phi.equations, psi.m)),
        IntMatrix.hstack(IntMatrix.zeros(psi.equations, phi.m), psi.b),
    )
    return PpFormula(phi.n, phi.m + psi.m, a, b)


def join(phi: PpFormula, psi: PpFormula) -> PpFormula:
    """Sum: ``E x' (phi(x') & psi(x - x'))``.

    Bound variables are ordered ``x'``, then phi's, then psi's.
    """
    _require_same_arity(phi, psi)
    n, e1, e2 = phi.n, phi.equations, psi.equations
    a = IntMatrix.vstack(IntMatrix.zeros(e1, n), psi.a)
    b = IntMatrix.vstack(
        IntMatrix.hstack(-phi.a, phi.b, IntMatrix.zeros(e1, psi.m)),
        IntMatrix.hstack(psi.a, IntMatrix.zeros(e2, phi.m), psi.b),
    )
    return PpFormula(n, n + phi.m + psi.m, a, b)


def exists(phi: PpFormula, keep: Sequence[int]) -> PpFormula:
    """Quantify out every free variable not listed in ``keep``.

    The kept variables are renumbered densely in the order given; the dropped
    ones become the first bound variables.
    """
    if any(not 0 <= j < phi.n for j in keep) or len(set(keep)) != len(keep):
        raise DimensionError(f"invalid variable selection {list(keep)} for arity {phi.n}")
    drop = [j for j in range(phi.n) if j not in keep]
    a = phi.a.select_columns(keep)
    b = IntMatrix.hstack(-phi.a.select_columns(drop), phi.b)
    return PpFormula(len(keep), len(drop) + phi.m, a, b)


def exists_prefix(phi: PpFormula, length: int) -> PpFormula:
    """Keep the first ``length`` free variables."""
    return exists(phi, range(length))


def pad(phi: PpFormula, arity: int) -> PpFormula:
    """Same formula read in ``arity`` free variables; extra ones unconstrained."""
    if arity < phi.n:
        raise DimensionError(f"cannot pad arity {phi.n} down to {arity}")
    a = IntMatrix.hstack(phi.a, IntMatrix.zeros(phi.equations, arity - phi.n))
    return PpFormula(arity, phi.m, a, phi.b)


def substitute(phi: PpFormula, c: IntMatrix) -> PpFormula:
    """``E x (z = c x & phi(x))`` in the new variables ``z``.

    ``c`` has one column per free variable of ``phi`` and one row per new
    variable. Any tuple ``t`` satisfying ``phi`` gives a tuple ``c . t``
    satisfying the result.
    """
    if c.cols != phi.n:
        raise DimensionError(f"substitution matrix has {c.cols} columns, formula arity is {phi.n}")
    k, e = c.rows, phi.equations
    a = IntMatrix.vstack(IntMatrix.identity(k), IntMatrix.zeros(e, k))
    b = IntMatrix.vstack(
        IntMatrix.hstack(c, IntMatrix.zeros(k, phi.m)),
        IntMatrix.hstack(-phi.a, phi.b),
    )
    return PpFormula(k, phi.n + phi.m, a, b)


def pullback(phi: PpFormula, c: IntMatrix) -> PpFormula:
    """``phi(c z)``: ``c`` has one row per variable of ``phi``."""
    if c.rows != phi.n:
        raise DimensionError(f"pullback matrix has {c.rows} rows, formula arity is {phi.n}")
    return PpFormula(c.cols, phi.m, phi.a @ c, phi.b)


def dualize(phi: PpFormula) -> PpFormula:
    """Elementary dual ``E z (x = a^T z & b^T z = 0)`` with one ``z`` per equation."""
    a = IntMatrix.vstack(IntMatrix.identity(phi.n), IntMatrix.zeros(phi.m, phi.n))
    b = IntMatrix.vstack(phi.a.transpose(), phi.b.transpose())
    return PpFormula(phi.n, phi.equations, a, b)


# ============================================================================
# EVALUATION
# ============================================================================

@dataclass(frozen=True)
class PpSubgroup:
    """``phi(M)`` as a lattice of flattened representative tuples."""

    module: FpModule
    arity: int
    lattice: Lattice

    def contains(self, t: ModuleTuple) -> bool:
        if t.arity != self.arity:
            raise DimensionError(f"tuple of arity {t.arity} against {self.arity}-place subgroup")
        return self.lattice.contains_vector(t.flatten())

    def contains_rows(self, rows: Sequence[Sequence[int]]) -> bool:
        return self.lattice.contains_vector([x for r in rows for x in r])

    def is_subgroup_of(self, other: "PpSubgroup") -> bool:
        return lattice_contains(other.lattice, self.lattice)

    def elements(self) -> Iterator[ModuleTuple]:
        """Every tuple of the subgroup; finite modules only."""
        for t in self.module.enumerate_tuples(self.arity):
            if self.contains(t):
                yield t

    def generators(self) -> list[ModuleTuple]:
        """Lattice basis rows as tuples, dropping those that are zero in the module."""
        k = self.module.num_gens
        gens = []
        for row in self.lattice.generators:
            t = ModuleTuple.of(self.module, [row[j * k:(j + 1) * k] for j in range(self.arity)])
            if not t.is_zero():
                gens.append(t)
        return gens


def _coordinate_relations(module: FpModule, copies: int) -> IntMatrix:
    return IntMatrix.identity(copies).kron(module.relation_matrix)


def evaluate(phi: PpFormula, module: FpModule) -> PpSubgroup:
    """The subgroup ``phi(M)`` of ``M^n``.

    Solves ``a x - b y`` in the relation lattice for every equation at once:
    the left kernel of the stacked system is projected onto the ``x`` part.
    """
    k = module.num_gens
    eye = IntMatrix.identity(k)
    system = IntMatrix.vstack(
        phi.a.transpose().kron(eye),
        (-phi.b.transpose()).kron(eye),
        _coordinate_relations(module, phi.equations),
    )
    solutions = left_kernel(system)
    lattice = solutions.project(range(phi.n * k))
    return PpSubgroup(module, phi.n, lattice)


def find_witness(phi: PpFormula, t: ModuleTuple) -> Optional[ModuleTuple]:
    """Values for the bound variables showing that ``t`` satisfies ``phi``."""
    module = t.module
    k = module.num_gens
    if t.arity != phi.n:
        raise DimensionError(f"tuple of arity {t.arity} for formula of arity {phi.n}")
    eye = IntMatrix.identity(k)
    system = IntMatrix.vstack(
        phi.b.transpose().kron(eye),
        _coordinate_relations(module, phi.equations),
    )
    # row i of a applied to the tuple, one block of k coordinates per equation
    target = [
        sum(phi.a.entries[i][j] * t.entry(j)[c] for j in range(phi.n))
        for i in range(phi.equations)
        for c in range(k)
    ]
    solved = solve_rows(system, target)
    if solved is None:
        return None
    particular, _ = solved
    return ModuleTuple.of(module, [particular[l * k:(l + 1) * k] for l in range(phi.m)])


def satisfies(phi: PpFormula, t: ModuleTuple) -> bool:
    return evaluate(phi, t.module).contains(t)


# ============================================================================
# POINTED MODULES
# ============================================================================

@dataclass(frozen=True)
class PointedModule:
    module: FpModule
    tuple: ModuleTuple

    @classmethod
    def of(cls, module: FpModule, rows: Sequence[Sequence[int]]) -> "PointedModule":
        return cls(module, ModuleTuple.of(module, rows))

    @property
    def arity(self) -> int:
        return self.tuple.arity


def free_realization(phi: PpFormula) -> PointedModule:
    """``Z^(n+m)`` modulo the rows of ``[a | -b]`` with the first ``n`` basis rows.

    >>> free_realization(annihilation(2)).module.invariant_factors
    (2,)
    """
    relations = IntMatrix.hstack(phi.a, -phi.b)
    module = present_module(phi.n + phi.m, relations)
    rows = IntMatrix.identity(phi.n + phi.m).entries[: phi.n]
    return PointedModule(module, ModuleTuple.of(module, rows))


def realization_map(phi: PpFormula, target: ModuleTuple) -> Optional[FpHom]:
    """Map from the free realization of ``phi`` sending its tuple to ``target``.

    ``None`` when ``target`` does not satisfy ``phi``.
    """
    witness = find_witness(phi, target)
    if witness is None:
        return None
    source = free_realization(phi).module
    images = IntMatrix.vstack(target.coords, witness.coords)
    return check_hom(source, target.module, images)


def pp_type_generator(p: PointedModule) -> PpFormula:
    """``E y (x = c y & rel y = 0)`` for tuple coordinates ``c``.

    Generates the pp type of the tuple: every pp formula it satisfies is
    implied by this one in all modules.
    """
    module, coords = p.module, p.tuple.coords
    n, k = coords.rows, module.num_gens
    rel = module.relation_matrix
    a = IntMatrix.vstack(IntMatrix.identity(n), IntMatrix.zeros(rel.rows, n))
    b = IntMatrix.vstack(coords, rel)
    return PpFormula(n, k, a, b)


def qf_annihilator(p: PointedModule) -> IntMatrix:
    """HNF basis of the integer relations among the tuple entries."""
    return relation_lattice_of(p.tuple).basis


def qf_type_formula(p: PointedModule) -> PpFormula:
    return qf_formula(qf_annihilator(p))
