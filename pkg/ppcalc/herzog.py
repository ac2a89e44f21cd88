"""
Tensor vanishing through pp formulas and their duals.

For a right tuple ``n`` in ``N`` and a left tuple ``m`` in ``M`` of the same
arity, ``sum n_i (x) m_i`` vanishes in ``N (x) M`` exactly when some pp
formula holds of ``m`` in ``M`` while its dual holds of ``n`` in ``N``. The
formula generating the type of ``m`` is always such a witness when one exists.
"""
import logging
from dataclasses import dataclass
from typing import Optional

from ppcalc.errors import DimensionError, PpCalcError
from ppcalc.formulas import PointedModule, PpFormula, dualize, pp_type_generator, satisfies
from ppcalc.linalg import Vector
from ppcalc.modules import tensor_product

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HerzogResult:
    """``zero`` with its witness formula and both memberships, or the nonzero coordinates."""

    zero: bool
    witness: Optional[PpFormula]
    holds_in_m: bool
    dual_holds_in_n: bool
    tensor_coords: Vector


def herzog_check(n: PointedModule, m: PointedModule) -> HerzogResult:
    """Decide whether ``sum n_i (x) m_i`` is zero and certify the answer.

    Raises:
        DimensionError: the tuples have different arities
    """
    if n.arity != m.arity:
        raise DimensionError(f"tuple arities {n.arity} and {m.arity} differ")
    product = tensor_product(n.module, m.module)
    coords = product.contract(n.tuple, m.tuple)
    if not product.module.is_zero_element(coords):
        logger.debug(f"tensor is nonzero in {product.module.describe()}: {coords}")
        return HerzogResult(False, None, False, False, coords)

    phi = pp_type_generator(m)
    holds_in_m = satisfies(phi, m.tuple)
    dual_holds = satisfies(dualize(phi), n.tuple)
    if not (holds_in_m and dual_holds):
        # the type generator of m must separate; failing here means a bug upstream
        raise PpCalcError("vanishing tensor without a type-generator witness")
    return HerzogResult(True, phi, holds_in_m, dual_holds, coords)
