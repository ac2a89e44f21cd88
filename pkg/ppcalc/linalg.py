"""
Exact integer lattice algebra.

Convention: every vector is a ROW. A matrix whose rows are relators spans a
lattice of row vectors, a matrix product ``x @ m`` applies ``m`` to the row
``x``, and Hermite/Smith forms are computed by row operations (the transform
multiplies from the left). The one exception is ``solve_linear``, which solves
the column system ``a . v = b`` because that is the shape callers state their
problems in; internally it transposes and works with rows as well.

All arithmetic runs on Python integers or sympy's ``ZZ`` domain, so entries
of any magnitude stay exact.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from sympy.core.intfunc import igcdex
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix

from ppcalc.errors import DimensionError

logger = logging.getLogger(__name__)

Vector = tuple[int, ...]


# ============================================================================
# INTEGER MATRICES
# ============================================================================

@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored row-major. Zero rows or columns are legal."""

    rows: int
    cols: int
    entries: tuple[Vector, ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionError(
                f"entries do not form a {self.rows}x{self.cols} matrix"
            )

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            if not data:
                raise DimensionError("column count needed for a matrix without rows")
            cols = len(data[0])
        return cls(len(data), cols, data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int]) -> "IntMatrix":
        n = len(values)
        return cls(n, n, tuple(tuple(values[i] if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def vstack(cls, *blocks: "IntMatrix") -> "IntMatrix":
        cols = {b.cols for b in blocks}
        if len(cols) > 1:
            raise DimensionError(f"cannot stack blocks with column counts {sorted(cols)}")
        width = cols.pop() if cols else 0
        return cls.from_rows([r for b in blocks for r in b.entries], width)

    @classmethod
    def hstack(cls, *blocks: "IntMatrix") -> "IntMatrix":
        heights = {b.rows for b in blocks}
        if len(heights) > 1:
            raise DimensionError(f"cannot join blocks with row counts {sorted(heights)}")
        height = heights.pop() if heights else 0
        width = sum(b.cols for b in blocks)
        return cls.from_rows(
            [sum((b.entries[i] for b in blocks), ()) for i in range(height)], width
        )

    # -- views --------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.entries)

    def to_list(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def transpose(self) -> "IntMatrix":
        if self.rows == 0:
            return IntMatrix.zeros(self.cols, 0)
        return IntMatrix(self.cols, self.rows, tuple(zip(*self.entries)))

    @property
    def T(self) -> "IntMatrix":
        return self.transpose()

    def select_rows(self, indices: Sequence[int]) -> "IntMatrix":
        return IntMatrix.from_rows([self.entries[i] for i in indices], self.cols)

    def select_columns(self, indices: Sequence[int]) -> "IntMatrix":
        return IntMatrix.from_rows([[r[j] for j in indices] for r in self.entries], len(indices))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def nonzero_rows(self) -> "IntMatrix":
        return IntMatrix.from_rows([r for r in self.entries if any(r)], self.cols)

    # -- arithmetic ---------------------------------------------------------

    def to_domain(self) -> DomainMatrix:
        return DomainMatrix([[ZZ(x) for x in r] for r in self.entries], self.shape, ZZ)

    @classmethod
    def from_domain(cls, dm: DomainMatrix) -> "IntMatrix":
        rows, cols = dm.shape
        return cls.from_rows([[int(x) for x in r] for r in dm.to_list()], cols)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        if 0 in (self.rows, self.cols, other.cols):
            return IntMatrix.zeros(self.rows, other.cols)
        return IntMatrix.from_domain(self.to_domain() * other.to_domain())

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return IntMatrix(self.rows, self.cols, tuple(
            tuple(x + y for x, y in zip(r, s)) for r, s in zip(self.entries, other.entries)
        ))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(-x for x in r) for r in self.entries))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(k * x for x in r) for r in self.entries))

    def apply(self, v: Sequence[int]) -> Vector:
        """Row vector times matrix."""
        if len(v) != self.rows:
            raise DimensionError(f"vector of length {len(v)} does not fit {self.shape}")
        return tuple(sum(v[i] * self.entries[i][j] for i in range(self.rows)) for j in range(self.cols))

    def kron(self, other: "IntMatrix") -> "IntMatrix":
        """Kronecker product; row ``i*p + k`` pairs row i of self with row k of other."""
        return IntMatrix.from_rows(
            [
                [x * y for x in r for y in s]
                for r in self.entries
                for s in other.entries
            ],
            self.cols * other.cols,
        )

    def det(self) -> int:
        if self.rows != self.cols:
            raise DimensionError(f"determinant of non-square {self.shape} matrix")
        if self.rows == 0:
            return 1
        return int(self.to_domain().det())

    def is_unimodular(self) -> bool:
        return self.rows == self.cols and self.det() in (1, -1)

    def inverse(self) -> "IntMatrix":
        """Inverse of a unimodular matrix, exact over the integers."""
        if not self.is_unimodular():
            raise DimensionError("only unimodular matrices have integer inverses")
        if self.rows == 0:
            return self
        inv = self.to_domain().to_field().inv()
        rows = []
        for r in inv.to_list():
            row = []
            for x in r:
                if int(x.denominator) != 1:
                    raise DimensionError("inverse has a non-integer entry")
                row.append(int(x.numerator))
            rows.append(row)
        return IntMatrix.from_rows(rows, self.cols)

    def __repr__(self) -> str:
        return f"IntMatrix({self.to_list()!r}, cols={self.cols})"


# ============================================================================
# NORMAL FORMS
# ============================================================================

def _combine_rows(rows: list[list[int]], p: int, i: int, s: int, t: int, x: int, y: int) -> None:
    """Replace (row p, row i) by (s*p + t*i, x*p + y*i)."""
    rp, ri = rows[p], rows[i]
    rows[p] = [s * a + t * b for a, b in zip(rp, ri)]
    rows[i] = [x * a + y * b for a, b in zip(rp, ri)]


def _add_row(rows: list[list[int]], target: int, source: int, factor: int) -> None:
    if factor:
        rows[target] = [a + factor * b for a, b in zip(rows[target], rows[source])]


def _hnf_lists(m: IntMatrix) -> tuple[list[list[int]], list[list[int]], list[int]]:
    h = m.to_list()
    u = IntMatrix.identity(m.rows).to_list()
    pivots: list[int] = []
    p = 0
    for col in range(m.cols):
        if p == m.rows:
            break
        for i in range(p + 1, m.rows):
            b = h[i][col]
            if b == 0:
                continue
            a = h[p][col]
            s, t, g = (int(z) for z in igcdex(a, b))
            for rows in (h, u):
                _combine_rows(rows, p, i, s, t, -b // g, a // g)
        pivot = h[p][col]
        if pivot == 0:
            continue
        if pivot < 0:
            h[p] = [-z for z in h[p]]
            u[p] = [-z for z in u[p]]
            pivot = -pivot
        for k in range(p):
            q = h[k][col] // pivot
            _add_row(h, k, p, -q)
            _add_row(u, k, p, -q)
        pivots.append(col)
        p += 1
    return h, u, pivots


def hermite_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row Hermite normal form with its transform.

    Returns ``(h, u)`` with ``u @ m == h``, ``u`` unimodular, pivots positive,
    entries above each pivot reduced into ``[0, pivot)``, and zero rows at the
    bottom. ``h`` keeps the shape of ``m``.

    >>> hermite_normal_form(IntMatrix.from_rows([[4], [6]]))[0].to_list()
    [[2], [0]]
    """
    h, u, _ = _hnf_lists(m)
    return IntMatrix.from_rows(h, m.cols), IntMatrix.from_rows(u, m.rows)


def pivot_columns(h: IntMatrix) -> list[int]:
    """Pivot column of each nonzero row of a matrix in row echelon form."""
    cols = []
    for r in h.entries:
        for j, x in enumerate(r):
            if x:
                cols.append(j)
                break
    return cols


def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form with both transforms.

    Returns ``(d, u, v)`` with ``u @ m @ v == d``, ``u`` and ``v`` unimodular and
    ``d`` diagonal, nonnegative, with each diagonal entry dividing the next.
    Zero diagonal entries come last.
    """
    r, c = m.shape
    d = m.to_list()
    u = IntMatrix.identity(r).to_list()
    # v is tracked transposed so column operations become row operations
    vt = IntMatrix.identity(c).to_list()

    def swap_rows(i: int, j: int) -> None:
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for row in d:
            row[i], row[j] = row[j], row[i]
        vt[i], vt[j] = vt[j], vt[i]

    def add_col(target: int, source: int, factor: int) -> None:
        for row in d:
            row[target] += factor * row[source]
        _add_row(vt, target, source, factor)

    t = 0
    while t < min(r, c):
        candidates = [
            (abs(d[i][j]), i, j) for i in range(t, r) for j in range(t, c) if d[i][j]
        ]
        if not candidates:
            break
        _, pi, pj = min(candidates)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            dirty = False
            for i in range(t + 1, r):
                if d[i][t]:
                    q = d[i][t] // d[t][t]
                    _add_row(d, i, t, -q)
                    _add_row(u, i, t, -q)
                    dirty = dirty or d[i][t] != 0
            for j in range(t + 1, c):
                if d[t][j]:
                    add_col(j, t, -(d[t][j] // d[t][t]))
                    dirty = dirty or d[t][j] != 0
            if dirty:
                leftovers = [(abs(d[i][t]), i, t) for i in range(t + 1, r) if d[i][t]]
                leftovers += [(abs(d[t][j]), t, j) for j in range(t + 1, c) if d[t][j]]
                _, li, lj = min(leftovers)
                if li != t:
                    swap_rows(t, li)
                else:
                    swap_cols(t, lj)
                continue
            offender = next(
                (i for i in range(t + 1, r) for j in range(t + 1, c) if d[i][j] % d[t][t]),
                None,
            )
            if offender is None:
                break
            _add_row(d, t, offender, 1)
            _add_row(u, t, offender, 1)
        if d[t][t] < 0:
            d[t] = [-z for z in d[t]]
            u[t] = [-z for z in u[t]]
        t += 1
    v = IntMatrix.from_rows(vt, c).transpose()
    return IntMatrix.from_rows(d, c), IntMatrix.from_rows(u, r), v


def smith_diagonal(m: IntMatrix) -> list[int]:
    d, _, _ = smith_normal_form(m)
    return [d.entries[i][i] for i in range(min(d.shape))]


# ============================================================================
# LATTICES
# ============================================================================

@dataclass(frozen=True)
class Lattice:
    """Subgroup of ``Z^ambient_dim`` held by its row HNF basis (no zero rows)."""

    ambient_dim: int
    basis: IntMatrix

    @classmethod
    def from_generators(cls, ambient_dim: int, generators: Iterable[Sequence[int]]) -> "Lattice":
        gens = IntMatrix.from_rows(list(generators), ambient_dim)
        h, _ = hermite_normal_form(gens)
        return cls(ambient_dim, h.nonzero_rows())

    @classmethod
    def from_matrix(cls, m: IntMatrix) -> "Lattice":
        return cls.from_generators(m.cols, m.entries)

    @classmethod
    def zero(cls, ambient_dim: int) -> "Lattice":
        return cls(ambient_dim, IntMatrix.zeros(0, ambient_dim))

    @classmethod
    def full(cls, ambient_dim: int) -> "Lattice":
        return cls(ambient_dim, IntMatrix.identity(ambient_dim))

    @property
    def rank(self) -> int:
        return self.basis.rows

    @property
    def generators(self) -> tuple[Vector, ...]:
        return self.basis.entries

    def reduce(self, v: Sequence[int]) -> Vector:
        """Canonical representative of ``v`` modulo this lattice."""
        if len(v) != self.ambient_dim:
            raise DimensionError(f"vector of length {len(v)} in ambient dimension {self.ambient_dim}")
        w = list(v)
        for row, col in zip(self.basis.entries, pivot_columns(self.basis)):
            q = w[col] // row[col]
            if q:
                w = [a - q * b for a, b in zip(w, row)]
        return tuple(w)

    def contains_vector(self, v: Sequence[int]) -> bool:
        return not any(self.reduce(v))

    def index(self) -> int:
        """Order of ``Z^n / self``; 0 when infinite."""
        if self.rank < self.ambient_dim:
            return 0
        result = 1
        for row, col in zip(self.basis.entries, pivot_columns(self.basis)):
            result *= row[col]
        return result

    def project(self, coords: Sequence[int]) -> "Lattice":
        """Image under the coordinate projection onto ``coords``."""
        return Lattice.from_generators(len(coords), [[r[j] for j in coords] for r in self.generators])

    def __repr__(self) -> str:
        return f"Lattice(dim={self.ambient_dim}, basis={self.basis.to_list()})"


def _require_same_ambient(x: Lattice, y: Lattice) -> None:
    if x.ambient_dim != y.ambient_dim:
        raise DimensionError(
            f"lattices live in dimensions {x.ambient_dim} and {y.ambient_dim}"
        )


def lattice_contains(x: Lattice, y: Lattice) -> bool:
    """True when ``x`` contains ``y``."""
    _require_same_ambient(x, y)
    return all(x.contains_vector(g) for g in y.generators)


def lattice_equals(x: Lattice, y: Lattice) -> bool:
    _require_same_ambient(x, y)
    return x.basis == y.basis


def lattice_sum(x: Lattice, y: Lattice) -> Lattice:
    _require_same_ambient(x, y)
    return Lattice.from_generators(x.ambient_dim, x.generators + y.generators)


def lattice_intersection(x: Lattice, y: Lattice) -> Lattice:
    _require_same_ambient(x, y)
    if x.rank == 0 or y.rank == 0:
        return Lattice.zero(x.ambient_dim)
    stacked = IntMatrix.vstack(x.basis, y.basis)
    kernel = left_kernel(stacked)
    first = kernel.basis.select_columns(range(x.rank))
    return Lattice.from_matrix(first @ x.basis)


def lattice_compare(x: Lattice, y: Lattice, mode: str) -> "bool | Lattice":
    """Dispatch on ``mode``: contains, equals, sum or intersection."""
    ops = {
        "contains": lattice_contains,
        "equals": lattice_equals,
        "sum": lattice_sum,
        "intersection": lattice_intersection,
    }
    if mode not in ops:
        raise ValueError(f"unknown lattice comparison mode: {mode}")
    return ops[mode](x, y)  # type: ignore[operator]


# ============================================================================
# LINEAR SYSTEMS
# ============================================================================

def left_kernel(m: IntMatrix) -> Lattice:
    """Lattice of rows ``x`` with ``x @ m == 0``."""
    h, u, pivots = _hnf_lists(m)
    return Lattice.from_generators(m.rows, u[len(pivots):])


def solve_rows(m: IntMatrix, target: Sequence[int]) -> Optional[tuple[Vector, Lattice]]:
    """Solve ``x @ m == target`` for an integer row ``x``.

    Returns the HNF-reduced particular solution and the kernel lattice, or
    ``None`` when no integer solution exists.
    """
    if len(target) != m.cols:
        raise DimensionError(f"target of length {len(target)} for {m.shape} matrix")
    h, u, pivots = _hnf_lists(m)
    z = [0] * m.rows
    residual = list(target)
    for k, col in enumerate(pivots):
        q, rem = divmod(residual[col], h[k][col])
        if rem:
            return None
        z[k] = q
        residual = [a - q * b for a, b in zip(residual, h[k])]
    if any(residual):
        return None
    x = [sum(z[k] * u[k][j] for k in range(len(pivots))) for j in range(m.rows)]
    kernel = Lattice.from_generators(m.rows, u[len(pivots):])
    return kernel.reduce(x), kernel


def solve_linear(a: IntMatrix, b: Sequence[int]) -> Optional[tuple[Vector, Lattice]]:
    """Solve the column system ``a . v = b`` over the integers.

    >>> solve_linear(IntMatrix.from_rows([[2]]), [4])[0]
    (2,)
    >>> solve_linear(IntMatrix.from_rows([[2]]), [3]) is None
    True
    """
    if len(b) != a.rows:
        raise DimensionError(f"right-hand side of length {len(b)} for {a.shape} system")
    return solve_rows(a.transpose(), b)
