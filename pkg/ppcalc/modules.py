"""
Finitely presented abelian groups.

A module on ``k`` generators is ``Z^k`` modulo the row lattice of its
relators. Elements are integer rows of length ``k``; two rows are the same
element when their difference is a relator combination. Homomorphisms are
``k_source x k_target`` matrices acting on rows from the right.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from functools import cached_property, reduce as fold
from typing import Iterable, Iterator, Optional, Sequence

from ppcalc.errors import DimensionError, IllDefinedHomError, InfiniteModuleError
from ppcalc.linalg import (
    IntMatrix,
    Lattice,
    Vector,
    lattice_contains,
    lattice_equals,
    left_kernel,
    smith_normal_form,
    solve_rows,
)

logger = logging.getLogger(__name__)


# ============================================================================
# MODULES
# ============================================================================

@dataclass(frozen=True)
class FpModule:
    """``Z^num_gens`` modulo ``relations``.

    ``invariant_factors`` lists the Smith diagonal without unit entries:
    torsion factors in divisibility order, then one ``0`` per free summand.
    So ``Z + Z/4`` has ``(4, 0)``, ``free_rank == 1`` and
    ``torsion_factors == (4,)``.
    """

    num_gens: int
    relations: Lattice
    invariant_factors: tuple[int, ...]

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d == 0)

    @property
    def torsion_factors(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d)

    @property
    def relation_matrix(self) -> IntMatrix:
        return self.relations.basis

    def is_zero(self) -> bool:
        return not self.invariant_factors

    def is_torsion(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int:
        """Number of elements; 0 when infinite."""
        if self.free_rank:
            return 0
        return math.prod(self.torsion_factors)

    def exponent(self) -> int:
        """Least ``s > 0`` with ``s*M = 0``; 0 when there is no such ``s``."""
        if self.free_rank:
            return 0
        return self.torsion_factors[-1] if self.torsion_factors else 1

    # -- elements -----------------------------------------------------------

    def reduce_vector(self, v: Sequence[int]) -> Vector:
        return self.relations.reduce(v)

    def is_zero_element(self, v: Sequence[int]) -> bool:
        return self.relations.contains_vector(v)

    def generator(self, i: int) -> Vector:
        return tuple(int(i == j) for j in range(self.num_gens))

    @cached_property
    def _smith(self) -> tuple[list[int], IntMatrix, IntMatrix]:
        # rows of relations @ v span the lattice generated by the diagonal d
        d, _, v = smith_normal_form(self.relation_matrix)
        diag = [d.entries[i][i] if i < d.rows else 0 for i in range(self.num_gens)]
        return diag, v, v.inverse()

    def smith_coordinates(self, x: Sequence[int]) -> Vector:
        _, v, _ = self._smith
        return v.apply(x)

    def element_order(self, x: Sequence[int]) -> int:
        """Additive order of ``x``; 0 when it has infinite order."""
        diag, _, _ = self._smith
        order = 1
        for d, y in zip(diag, self.smith_coordinates(x)):
            if d == 0:
                if y:
                    return 0
                continue
            order = math.lcm(order, d // math.gcd(d, y))
        return order

    def enumerate_elements(self) -> Iterator[Vector]:
        """Canonical representatives of every element of a finite module."""
        if self.free_rank:
            raise InfiniteModuleError(
                f"module with invariant factors {list(self.invariant_factors)} is infinite"
            )
        diag, _, v_inv = self._smith
        for y in itertools.product(*(range(d) for d in diag)):
            yield self.reduce_vector(v_inv.apply(y) if self.num_gens else ())

    def enumerate_tuples(self, arity: int) -> Iterator["ModuleTuple"]:
        elements = list(self.enumerate_elements())
        for combo in itertools.product(elements, repeat=arity):
            yield ModuleTuple.of(self, combo)

    def describe(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion_factors] + ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"FpModule({self.describe()}, gens={self.num_gens})"


def present_module(k: int, relations: IntMatrix) -> FpModule:
    """Module on ``k`` generators with the given relator rows.

    >>> present_module(1, IntMatrix.from_rows([[4]])).invariant_factors
    (4,)
    >>> present_module(2, IntMatrix.from_rows([[2, 0], [0, 3]])).invariant_factors
    (6,)
    """
    if relations.cols != k:
        raise DimensionError(f"relations have {relations.cols} columns, expected {k}")
    lattice = Lattice.from_matrix(relations)
    d, _, _ = smith_normal_form(lattice.basis)
    diag = [d.entries[i][i] for i in range(min(d.shape))]
    torsion = tuple(x for x in diag if x > 1)
    free_rank = k - sum(1 for x in diag if x)
    return FpModule(k, lattice, torsion + (0,) * free_rank)


def module_from_rows(k: int, rows: Iterable[Sequence[int]]) -> FpModule:
    return present_module(k, IntMatrix.from_rows(list(rows), k))


def zero_module() -> FpModule:
    return present_module(0, IntMatrix.zeros(0, 0))


def free_module(k: int) -> FpModule:
    return present_module(k, IntMatrix.zeros(0, k))


def cyclic_module(n: int) -> FpModule:
    """``Z/n`` on one generator; ``n == 0`` gives ``Z``."""
    return present_module(1, IntMatrix.from_rows([[n]], 1))


def finite_abelian(*orders: int) -> FpModule:
    """Direct sum of cyclic groups, one generator each."""
    return present_module(len(orders), IntMatrix.diagonal(list(orders)))


def same_structure(a: FpModule, b: FpModule) -> bool:
    """Isomorphism test through invariant factors."""
    return a.invariant_factors == b.invariant_factors


# ============================================================================
# TUPLES
# ============================================================================

@dataclass(frozen=True)
class ModuleTuple:
    """Tuple of ``arity`` elements of ``module``; row t is entry t."""

    module: FpModule
    coords: IntMatrix

    def __post_init__(self) -> None:
        if self.coords.cols != self.module.num_gens:
            raise DimensionError(
                f"tuple rows have length {self.coords.cols}, module has {self.module.num_gens} generators"
            )

    @classmethod
    def of(cls, module: FpModule, rows: Iterable[Sequence[int]]) -> "ModuleTuple":
        """Reduced tuple from raw representative rows."""
        raw = cls(module, IntMatrix.from_rows(list(rows), module.num_gens))
        return reduce(raw)

    @classmethod
    def generators(cls, module: FpModule) -> "ModuleTuple":
        return cls.of(module, IntMatrix.identity(module.num_gens).entries)

    @classmethod
    def empty(cls, module: FpModule) -> "ModuleTuple":
        return cls(module, IntMatrix.zeros(0, module.num_gens))

    @property
    def arity(self) -> int:
        return self.coords.rows

    def entry(self, t: int) -> Vector:
        return self.coords.row(t)

    def concat(self, other: "ModuleTuple") -> "ModuleTuple":
        if other.module != self.module:
            raise DimensionError("cannot concatenate tuples from different modules")
        return ModuleTuple(self.module, IntMatrix.vstack(self.coords, other.coords))

    def prefix(self, length: int) -> "ModuleTuple":
        return ModuleTuple(self.module, self.coords.select_rows(range(length)))

    def select(self, indices: Sequence[int]) -> "ModuleTuple":
        return ModuleTuple(self.module, self.coords.select_rows(indices))

    def is_zero(self) -> bool:
        return all(self.module.is_zero_element(r) for r in self.coords.entries)

    def flatten(self) -> Vector:
        """Entries concatenated into one row of length ``arity * num_gens``."""
        return tuple(x for r in self.coords.entries for x in r)


def reduce(t: ModuleTuple) -> ModuleTuple:
    """Canonical representative of every entry.

    >>> reduce(ModuleTuple(cyclic_module(4), IntMatrix.from_rows([[6]]))).coords.to_list()
    [[2]]
    """
    m = t.module
    return ModuleTuple(m, IntMatrix.from_rows([m.reduce_vector(r) for r in t.coords.entries], m.num_gens))


def span_lattice(t: ModuleTuple) -> Lattice:
    """Preimage in ``Z^k`` of the submodule generated by the tuple."""
    return Lattice.from_generators(
        t.module.num_gens, t.coords.entries + t.module.relations.generators
    )


# ============================================================================
# HOMOMORPHISMS
# ============================================================================

@dataclass(frozen=True)
class FpHom:
    """Group homomorphism given on generator rows; build through ``check_hom``."""

    source: FpModule
    target: FpModule
    matrix: IntMatrix

    def apply(self, x: Sequence[int]) -> Vector:
        return self.target.reduce_vector(self.matrix.apply(x))

    def apply_tuple(self, t: ModuleTuple) -> ModuleTuple:
        if t.module != self.source:
            raise DimensionError("tuple does not live in the source of the map")
        return ModuleTuple.of(self.target, (self.matrix.apply(r) for r in t.coords.entries))

    def image_lattice(self) -> Lattice:
        return Lattice.from_generators(
            self.target.num_gens, self.matrix.entries + self.target.relations.generators
        )

    def kernel_lattice(self) -> Lattice:
        """Rows of ``Z^k_source`` mapped to zero; contains the source relations."""
        stacked = IntMatrix.vstack(self.matrix, self.target.relation_matrix)
        return left_kernel(stacked).project(range(self.source.num_gens))

    def is_surjective(self) -> bool:
        return lattice_equals(self.image_lattice(), Lattice.full(self.target.num_gens))

    def is_injective(self) -> bool:
        return lattice_contains(self.source.relations, self.kernel_lattice())

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()


def _shape_problem(source: FpModule, target: FpModule, matrix: IntMatrix) -> Optional[str]:
    expected = (source.num_gens, target.num_gens)
    if matrix.shape != expected:
        return f"matrix shape {matrix.shape} differs from {expected}"
    return None


def _relator_violations(
    source: FpModule, target: FpModule, matrix: IntMatrix
) -> Iterator[tuple[int, Vector, Vector]]:
    """``(index, relator, image)`` for each source relator not killed in the target."""
    for i, relator in enumerate(source.relations.generators):
        image = matrix.apply(relator)
        if not target.is_zero_element(image):
            yield i, relator, image


def find_hom_violations(source: FpModule, target: FpModule, matrix: IntMatrix) -> list[str]:
    """Problems that keep ``matrix`` from defining a map; empty when well-defined."""
    shape = _shape_problem(source, target, matrix)
    if shape:
        return [shape]
    return [
        f"relator {i} {list(relator)} maps to nonzero {list(image)}"
        for i, relator, image in _relator_violations(source, target, matrix)
    ]


def check_hom(source: FpModule, target: FpModule, matrix: IntMatrix) -> FpHom:
    """Accept ``matrix`` as a map ``source -> target`` or raise on its first problem.

    Raises:
        DimensionError: the matrix has the wrong shape
        IllDefinedHomError: a relator of the source maps outside the target relations
    """
    shape = _shape_problem(source, target, matrix)
    if shape:
        raise DimensionError(shape)
    violation = next(_relator_violations(source, target, matrix), None)
    if violation is not None:
        i, _, image = violation
        logger.debug(f"relator {i} violates target relations: {image}")
        raise IllDefinedHomError(i, image)
    return FpHom(source, target, matrix)


def hom_from_tuple(source: FpModule, images: ModuleTuple) -> FpHom:
    """Map sending generator i of ``source`` to entry i of ``images``."""
    if images.arity != source.num_gens:
        raise DimensionError(
            f"{images.arity} images for {source.num_gens} generators"
        )
    return check_hom(source, images.module, images.coords)


def identity_hom(m: FpModule) -> FpHom:
    return FpHom(m, m, IntMatrix.identity(m.num_gens))


def zero_hom(source: FpModule, target: FpModule) -> FpHom:
    return FpHom(source, target, IntMatrix.zeros(source.num_gens, target.num_gens))


def compose(first: FpHom, second: FpHom) -> FpHom:
    """``second`` after ``first``."""
    if first.target != second.source:
        raise DimensionError("maps do not compose: target and source differ")
    return FpHom(first.source, second.target, first.matrix @ second.matrix)


# ============================================================================
# CONSTRUCTIONS
# ============================================================================

@dataclass(frozen=True)
class DirectSum:
    module: FpModule
    injections: tuple[FpHom, FpHom]
    projections: tuple[FpHom, FpHom]


def direct_sum(a: FpModule, b: FpModule) -> DirectSum:
    """Block presentation of ``a + b`` with its structure maps."""
    ka, kb = a.num_gens, b.num_gens
    relations = IntMatrix.vstack(
        IntMatrix.hstack(a.relation_matrix, IntMatrix.zeros(a.relations.rank, kb)),
        IntMatrix.hstack(IntMatrix.zeros(b.relations.rank, ka), b.relation_matrix),
    )
    s = present_module(ka + kb, relations)
    inj_a = FpHom(a, s, IntMatrix.hstack(IntMatrix.identity(ka), IntMatrix.zeros(ka, kb)))
    inj_b = FpHom(b, s, IntMatrix.hstack(IntMatrix.zeros(kb, ka), IntMatrix.identity(kb)))
    proj_a = FpHom(s, a, IntMatrix.vstack(IntMatrix.identity(ka), IntMatrix.zeros(kb, ka)))
    proj_b = FpHom(s, b, IntMatrix.vstack(IntMatrix.zeros(ka, kb), IntMatrix.identity(kb)))
    return DirectSum(s, (inj_a, inj_b), (proj_a, proj_b))


def direct_sum_all(modules: Sequence[FpModule]) -> FpModule:
    return fold(lambda acc, m: direct_sum(acc, m).module, modules, zero_module())


@dataclass(frozen=True)
class TensorProduct:
    """``left (x) right`` on generators ``e_ij`` at index ``i * k_right + j``."""

    module: FpModule
    left: FpModule
    right: FpModule

    def bilinear_element(self, x: Sequence[int], y: Sequence[int]) -> Vector:
        return self.module.reduce_vector([a * b for a in x for b in y])

    def bilinear(self, s: ModuleTuple, t: ModuleTuple) -> ModuleTuple:
        """Entrywise tensors ``s_i (x) t_i``."""
        if s.arity != t.arity:
            raise DimensionError(f"arities {s.arity} and {t.arity} differ")
        return ModuleTuple.of(
            self.module,
            [[a * b for a in x for b in y] for x, y in zip(s.coords.entries, t.coords.entries)],
        )

    def contract(self, s: ModuleTuple, t: ModuleTuple) -> Vector:
        """The element ``sum_i s_i (x) t_i``."""
        pieces = self.bilinear(s, t).coords.entries
        total = [sum(col) for col in zip(*pieces)] if pieces else [0] * self.module.num_gens
        return self.module.reduce_vector(total)


def tensor_product(a: FpModule, b: FpModule) -> TensorProduct:
    """Presentation with relators ``r (x) e_j`` and ``e_i (x) s``.

    >>> tensor_product(cyclic_module(4), cyclic_module(6)).module.invariant_factors
    (2,)
    """
    ka, kb = a.num_gens, b.num_gens
    relations = IntMatrix.vstack(
        a.relation_matrix.kron(IntMatrix.identity(kb)),
        IntMatrix.identity(ka).kron(b.relation_matrix),
    )
    return TensorProduct(present_module(ka * kb, relations), a, b)


def quotient_by(m: FpModule, gens: ModuleTuple) -> tuple[FpModule, FpHom]:
    """``m`` modulo the subgroup generated by ``gens``, with the canonical surjection."""
    if gens.module != m:
        raise DimensionError("generators do not live in the module")
    q = present_module(m.num_gens, IntMatrix.vstack(m.relation_matrix, gens.coords))
    return q, FpHom(m, q, IntMatrix.identity(m.num_gens))


@dataclass(frozen=True)
class SubmodulePresentation:
    """Abstract presentation of ``<gens>`` and its inclusion into the ambient module."""

    module: FpModule
    inclusion: FpHom


def relation_lattice_of(t: ModuleTuple) -> Lattice:
    """All ``c`` in ``Z^n`` with ``sum_t c_t * t_t == 0``."""
    stacked = IntMatrix.vstack(t.coords, t.module.relation_matrix)
    return left_kernel(stacked).project(range(t.arity))


def submodule_presentation(m: FpModule, gens: ModuleTuple) -> SubmodulePresentation:
    """Present ``<gens>`` inside ``m`` on one generator per tuple entry."""
    if gens.module != m:
        raise DimensionError("generators do not live in the module")
    n = gens.arity
    sub = present_module(n, relation_lattice_of(gens).basis)
    return SubmodulePresentation(sub, FpHom(sub, m, gens.coords))


def image_presentation(h: FpHom) -> SubmodulePresentation:
    """The image of ``h`` as a finitely presented submodule of its target."""
    return submodule_presentation(h.target, ModuleTuple.of(h.target, h.matrix.entries))


def express_in(t: ModuleTuple, x: Sequence[int]) -> Optional[Vector]:
    """Coefficients ``c`` with ``sum_t c_t * t_t == x`` in the module, if any.

    The returned coefficients are the HNF-reduced solution.
    """
    m = t.module
    stacked = IntMatrix.vstack(t.coords, m.relation_matrix)
    solved = solve_rows(stacked, x)
    if solved is None:
        return None
    particular, _ = solved
    return particular[: t.arity]
