"""
Built-in worked examples, runnable from ``ppcalc demo``.

Each demo returns a report dict with the computed certificates, the values
they were expected to take, and an overall ``holds`` flag. The demos are
deterministic, so repeated runs render byte-identical JSON.
"""
import logging
from typing import Any

from ppcalc.chains import prufer_alpha, prufer_chain, realize_as_pure_image, verify_l_chain
from ppcalc.dsl import parse_formula
from ppcalc.formulas import PointedModule, free_realization, pp_type_generator, qf_annihilator, qf_type_formula
from ppcalc.implication import TestClass, equivalent, implies
from ppcalc.limits import OmegaLimit, tail_stabilization
from ppcalc.modules import ModuleTuple, cyclic_module
from ppcalc.purity import is_pure

logger = logging.getLogger(__name__)

DEMO_Z4 = "z4"
DEMO_PRUFER = "prufer"
DEMOS = (DEMO_Z4, DEMO_PRUFER)


def _check(checks: list[dict[str, Any]], name: str, value: Any, expected: Any) -> None:
    ok = value == expected
    checks.append({"check": name, "value": value, "expected": expected, "ok": ok})
    logger.info(f"   {'✓' if ok else '✗'} {name}")


def demo_z4() -> dict[str, Any]:
    """The subgroup ``{0, 2}`` of ``Z/4``: flat-pure but not pure.

    The type of ``2`` is generated by ``2|x & 2x = 0``; the subgroup alone only
    sees ``2x = 0``. Over torsion-free groups both collapse to ``x = 0``.
    """
    logger.info("🔍 Demo z4: the subgroup {0, 2} of Z/4")
    m = cyclic_module(4)
    two = PointedModule.of(m, [[2]])
    phi = pp_type_generator(two)
    psi = qf_type_formula(two)
    zero = parse_formula("x1 = 0")
    absolute, flat = TestClass.absolute(), TestClass.flat()

    checks: list[dict[str, Any]] = []
    _check(checks, "pure (absolute)", is_pure(m, two.tuple, absolute).holds, False)
    _check(checks, "pure (flat)", is_pure(m, two.tuple, flat).holds, True)
    _check(checks, "type generator ~ 2|x1 & 2*x1 = 0", equivalent(phi, parse_formula("2|x1 & 2*x1 = 0"), absolute), True)
    _check(checks, "qf annihilator", qf_annihilator(two).to_list(), [[2]])
    _check(checks, "type generator ~flat x1 = 0", equivalent(phi, zero, flat), True)
    _check(checks, "qf type ~flat x1 = 0", equivalent(psi, zero, flat), True)
    _check(checks, "qf type implies type generator (absolute)", implies(psi, phi, absolute).holds, False)
    return {
        "demo": DEMO_Z4,
        "holds": all(c["ok"] for c in checks),
        "module": m,
        "tuple": two.tuple,
        "phi": phi,
        "psi": psi,
        "checks": checks,
    }


def demo_prufer(p: int = 2, budget: int = 8) -> dict[str, Any]:
    """The Prufer group as a flat limit whose tail types never stabilize absolutely."""
    logger.info(f"🔍 Demo prufer: p={p}, budget={budget}")
    absolute, flat = TestClass.absolute(), TestClass.flat()
    checks: list[dict[str, Any]] = []

    realizations = [free_realization(prufer_alpha(p, i)).module.invariant_factors for i in range(1, budget + 1)]
    _check(checks, "free realizations of the Prufer formulas", [list(f) for f in realizations],
           [[p ** i] for i in range(1, budget + 1)])

    chain = prufer_chain(p, budget)
    flat_verdict = verify_l_chain(chain, flat)
    _check(checks, "chain verified (flat)", flat_verdict.holds, True)
    _check(checks, "chain verified (absolute)", verify_l_chain(chain, absolute).holds, False)

    lim = OmegaLimit.prufer(p, budget)
    q0 = ModuleTuple.generators(lim.stage(1))
    flat_tail = tail_stabilization(lim, 1, q0, flat)
    absolute_tail = tail_stabilization(lim, 1, q0, absolute)
    _check(checks, "tail stabilizes (flat)", flat_tail.stabilized and (flat_tail.stage or 0) <= 1, True)
    _check(checks, "tail stabilizes (absolute)", absolute_tail.stabilized, False)
    _check(checks, "absolute tail chain length", len(absolute_tail.chain), budget)

    chain_limit = OmegaLimit.from_chain(flat_verdict.chain, budget - 1)
    stages = [list(chain_limit.stage(k).invariant_factors) for k in range(budget)]
    _check(checks, "chain limit stages", stages, [[p ** (k + 2)] for k in range(budget)])
    multiplies = []
    for k in range(budget - 1):
        last = chain_limit.stage(k).generator(k + 1)
        image = chain_limit.connecting_map(k).apply(last)
        following = chain_limit.stage(k + 1)
        multiplies.append(following.is_zero_element(
            [a - p * b for a, b in zip(image, following.generator(k + 2))]
        ))
    _check(checks, f"connecting maps multiply by {p}", all(multiplies), True)

    realization = realize_as_pure_image(lim, flat)
    stage_checks = realization.report.stages
    _check(checks, "realization surjective at every stage", all(s.surjective for s in stage_checks), True)
    _check(checks, "realization flat-pure on generators", all(s.pure_on_generators for s in stage_checks), True)
    _check(checks, "realization injective at some stage", any(s.injective for s in stage_checks), False)
    return {
        "demo": DEMO_PRUFER,
        "p": p,
        "budget": budget,
        "holds": all(c["ok"] for c in checks),
        "tail_flat": flat_tail,
        "tail_absolute": absolute_tail,
        "realization": realization,
        "checks": checks,
    }


def run_demo(name: str) -> dict[str, Any]:
    if name == DEMO_Z4:
        return demo_z4()
    if name == DEMO_PRUFER:
        return demo_prufer()
    raise ValueError(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}")
