"""
ppcalc: positive primitive formulas over the integers.

Exact calculus for pp formulas on finitely presented abelian groups:
evaluation, free realizations, duality and relative implication, plus the
purity, chain and omega-limit machinery built on top of them.

Submodules:
    - linalg: integer matrices, Hermite and Smith forms, lattices
    - modules: finitely presented modules, tuples and homomorphisms
    - formulas, dsl: pp formulas and their text syntax
    - implication: implication relative to a test class
    - limits, chains: omega-limits, tails and chains of formulas
    - purity, herzog: purity certificates and tensor vanishing
    - serialization, session, reports, cli: JSON, sessions and the command line
"""
from ppcalc.chains import (
    LChain,
    arrange_l_chain,
    arrange_limit_chain,
    build_m_phi,
    prufer_chain,
    realize_as_pure_image,
    tau_chain,
    verify_l_chain,
)
from ppcalc.config import Settings, load_settings
from ppcalc.dsl import format_formula, parse_formula
from ppcalc.errors import PpCalcError
from ppcalc.formulas import (
    PointedModule,
    PpFormula,
    dualize,
    evaluate,
    exists,
    free_realization,
    join,
    meet,
    pp_type_generator,
    qf_annihilator,
)
from ppcalc.herzog import herzog_check
from ppcalc.implication import TestClass, equivalent, implies
from ppcalc.limits import OmegaLimit, tail_stabilization
from ppcalc.linalg import IntMatrix, Lattice, hermite_normal_form, smith_normal_form, solve_linear
from ppcalc.modules import FpHom, FpModule, ModuleTuple, check_hom, present_module, tensor_product
from ppcalc.purity import is_pure, separate_pure, uniform_pure_epi_check
from ppcalc.reports import emit_report
from ppcalc.session import Session, load_session, save_session

__all__ = [
    # linear algebra
    'IntMatrix',
    'Lattice',
    'hermite_normal_form',
    'smith_normal_form',
    'solve_linear',
    # modules
    'FpModule',
    'FpHom',
    'ModuleTuple',
    'present_module',
    'check_hom',
    'tensor_product',
    # formulas
    'PpFormula',
    'PointedModule',
    'parse_formula',
    'format_formula',
    'meet',
    'join',
    'exists',
    'dualize',
    'evaluate',
    'free_realization',
    'pp_type_generator',
    'qf_annihilator',
    # implication
    'TestClass',
    'implies',
    'equivalent',
    # engine
    'OmegaLimit',
    'tail_stabilization',
    'LChain',
    'verify_l_chain',
    'build_m_phi',
    'arrange_l_chain',
    'arrange_limit_chain',
    'prufer_chain',
    'tau_chain',
    'realize_as_pure_image',
    'is_pure',
    'separate_pure',
    'uniform_pure_epi_check',
    'herzog_check',
    # plumbing
    'PpCalcError',
    'Settings',
    'load_settings',
    'Session',
    'load_session',
    'save_session',
    'emit_report',
]
