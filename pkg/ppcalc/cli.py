"""
Command-line entry point.

    ppcalc eval "E y1 . x1 - 2*y1 = 0" --module '{"gens": 1, "relations": [[4]]}'
    ppcalc implies --class flat "2*x1 = 0" "x1 = 0"
    ppcalc demo z4

Reports go to standard output, logs to standard error. Exit codes: 0 the
result was computed and its property holds, 1 the property fails, 2 input
error, 64 unknown command, 65 unparsable formula or JSON.
"""
import argparse
import logging
import os
import shlex
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from ppcalc.chains import (
    ChainVerification,
    LChain,
    arrange_l_chain,
    build_m_phi,
    realize_as_pure_image,
    verify_l_chain,
)
from ppcalc.config import load_settings
from ppcalc.constants import (
    CLASS_NAMES,
    ENV_LOG_LEVEL,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    EXIT_PARSE_ERROR,
    EXIT_PROPERTY_FAILS,
    EXIT_UNKNOWN_COMMAND,
    LOG_DATE_FORMAT,
    LOG_FORMAT,
)
from ppcalc.demos import DEMOS, run_demo
from ppcalc.dsl import parse_formula
from ppcalc.errors import FormulaSyntaxError, MalformedJsonError, PpCalcError, SessionSchemaError
from ppcalc.formulas import (
    PointedModule,
    PpFormula,
    dualize,
    evaluate,
    free_realization,
    pp_type_generator,
    qf_type_formula,
)
from ppcalc.herzog import herzog_check
from ppcalc.implication import EXPLICIT, TestClass, implies
from ppcalc.limits import OmegaLimit, tail_generators, tail_stabilization
from ppcalc.modules import FpModule, ModuleTuple, tensor_product
from ppcalc.purity import is_pure, separate_pure, uniform_pure_epi_check
from ppcalc.reports import FORMATS, JSON, render, to_report
from ppcalc.serialization import (
    chain_from_dict,
    decode_matrix,
    explicit_modules_from_json,
    formula_from_dict,
    hom_from_dict,
    limit_from_dict,
    loads,
    module_from_dict,
)
from ppcalc.session import Session, load_session, save_session

logger = logging.getLogger(__name__)

COMMANDS = (
    "eval", "implies", "equiv", "dual", "freerealize", "pptype", "qftype", "purity",
    "tensor", "herzog", "chain", "limit", "separate", "realize", "epi", "demo",
)

# report keys whose False value means "property fails"
PROPERTY_KEYS = ("holds", "stabilized", "zero")


class Inputs:
    """Resolves command-line arguments against an optional session."""

    def __init__(self, session: Optional[Session]):
        self.session = session

    def _lookup(self, kind: str, ref: str) -> Any:
        if self.session is None:
            raise SessionSchemaError("<session>", kind, f"reference {ref!r} needs --session")
        return self.session.get(kind, ref)

    def formula(self, text: str) -> PpFormula:
        if text.startswith("@"):
            phi: PpFormula = self._lookup("formulas", text)
            return phi
        if text.lstrip().startswith("{"):
            return formula_from_dict(loads(text, "formula"), "formula")
        return parse_formula(text)

    def module(self, text: str, field: str = "module") -> FpModule:
        if text.startswith("@"):
            m: FpModule = self._lookup("modules", text)
            return m
        return module_from_dict(loads(text, field), field)

    def tuple(self, module: FpModule, text: str, field: str = "tuple") -> ModuleTuple:
        coords = decode_matrix(loads(text, field), module.num_gens, field, "coords")
        return ModuleTuple.of(module, coords.entries)

    def limit(self, text: str) -> OmegaLimit:
        if text.startswith("@"):
            lim: OmegaLimit = self._lookup("limits", text)
            return lim
        return limit_from_dict(loads(text, "limit"), "limit")

    def chain(self, text: str) -> LChain:
        if text.startswith("@"):
            chain: LChain = self._lookup("chains", text)
            return chain
        return chain_from_dict(loads(text, "chain"), "chain")


def parse_test_class(text: str) -> TestClass:
    """``absolute``, ``flat``, ``abspure`` or ``explicit:<file>``."""
    kind, _, path = text.partition(":")
    if kind not in CLASS_NAMES:
        raise SessionSchemaError("--class", "class", f"unknown test class {kind!r}")
    if kind != EXPLICIT:
        if path:
            raise SessionSchemaError("--class", "class", f"{kind} takes no module file")
        return TestClass(kind)
    if not path:
        raise SessionSchemaError("--class", "class", "explicit needs a module file: explicit:<file>")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SessionSchemaError(path, "<file>", f"cannot read: {e.strerror}") from e
    return TestClass.explicit(explicit_modules_from_json(loads(text, path), path))


# ============================================================================
# SUBCOMMANDS
# ============================================================================

def _cmd_eval(args: argparse.Namespace, inputs: Inputs) -> Any:
    return evaluate(inputs.formula(args.formula), inputs.module(args.module))


def _cmd_implies(args: argparse.Namespace, inputs: Inputs) -> Any:
    return implies(inputs.formula(args.phi), inputs.formula(args.psi), parse_test_class(args.test_class))


def _cmd_equiv(args: argparse.Namespace, inputs: Inputs) -> Any:
    phi, psi = inputs.formula(args.phi), inputs.formula(args.psi)
    test_class = parse_test_class(args.test_class)
    forward, backward = implies(phi, psi, test_class), implies(psi, phi, test_class)
    return {
        "holds": forward.holds and backward.holds,
        "class": str(test_class),
        "forward": forward,
        "backward": backward,
    }


def _cmd_dual(args: argparse.Namespace, inputs: Inputs) -> Any:
    return dualize(inputs.formula(args.formula))


def _cmd_freerealize(args: argparse.Namespace, inputs: Inputs) -> Any:
    return free_realization(inputs.formula(args.formula))


def _pointed(args: argparse.Namespace, inputs: Inputs) -> PointedModule:
    module = inputs.module(args.module)
    return PointedModule(module, inputs.tuple(module, args.tuple))


def _cmd_pptype(args: argparse.Namespace, inputs: Inputs) -> Any:
    return pp_type_generator(_pointed(args, inputs))


def _cmd_qftype(args: argparse.Namespace, inputs: Inputs) -> Any:
    return qf_type_formula(_pointed(args, inputs))


def _cmd_purity(args: argparse.Namespace, inputs: Inputs) -> Any:
    p = _pointed(args, inputs)
    return is_pure(p.module, p.tuple, parse_test_class(args.test_class))


def _cmd_tensor(args: argparse.Namespace, inputs: Inputs) -> Any:
    left, right = inputs.module(args.left, "left"), inputs.module(args.right, "right")
    product = tensor_product(left, right)
    report: dict[str, Any] = {"product": product}
    if args.left_tuple and args.right_tuple:
        s = inputs.tuple(left, args.left_tuple, "left-tuple")
        t = inputs.tuple(right, args.right_tuple, "right-tuple")
        element = product.contract(s, t)
        report["element"] = [str(v) for v in element]
        report["element_is_zero"] = product.module.is_zero_element(element)
    return report


def _cmd_herzog(args: argparse.Namespace, inputs: Inputs) -> Any:
    left, right = inputs.module(args.left, "left"), inputs.module(args.right, "right")
    n = PointedModule(left, inputs.tuple(left, args.left_tuple, "left-tuple"))
    m = PointedModule(right, inputs.tuple(right, args.right_tuple, "right-tuple"))
    return herzog_check(n, m)


def _budget(args: argparse.Namespace, available: Optional[int] = None) -> int:
    """``--budget`` > ``PPCALC_BUDGET`` > default.

    Without ``--budget`` the result is capped at ``available`` stages, so the
    environment never asks for more stages than a chain or limit has.
    """
    resolved = load_settings(budget=args.budget).budget
    if args.budget is None and available is not None:
        return min(resolved, available)
    return resolved


def _cmd_chain(args: argparse.Namespace, inputs: Inputs) -> Any:
    test_class = parse_test_class(args.test_class)
    if args.action == "arrange":
        if not args.module:
            raise SessionSchemaError("chain arrange", "module", "--module is required")
        return arrange_l_chain(inputs.module(args.module), test_class=test_class)
    if not args.chain:
        raise SessionSchemaError(f"chain {args.action}", "chain", "--chain is required")
    verification = verify_l_chain(inputs.chain(args.chain), test_class)
    if args.action == "verify":
        return verification
    chain = verification.chain
    lim = build_m_phi(chain, _budget(args, chain.length - 1), test_class)
    lim.materialize()
    return lim


def _cmd_limit(args: argparse.Namespace, inputs: Inputs) -> Any:
    lim = inputs.limit(args.limit)
    t = inputs.tuple(lim.stage(args.start), args.tuple)
    if args.action == "tails":
        stop = _budget(args, lim.budget)
        tuples = lim.tail(t, args.start, stop)
        generators = tail_generators(lim, args.start, t, stop)
        return {
            "family": lim,
            "tail": [
                {"stage": args.start + i, "tuple": u, "generator": phi}
                for i, (u, phi) in enumerate(zip(tuples, generators))
            ],
        }
    budget = _budget(args, lim.budget)
    return tail_stabilization(lim, args.start, t, parse_test_class(args.test_class), budget)


def _cmd_separate(args: argparse.Namespace, inputs: Inputs) -> Any:
    p = _pointed(args, inputs)
    return separate_pure(p.module, p.tuple, parse_test_class(args.test_class), _budget(args))


def _cmd_realize(args: argparse.Namespace, inputs: Inputs) -> Any:
    test_class = parse_test_class(args.test_class)
    if bool(args.module) == bool(args.limit):
        raise SessionSchemaError("realize", "module", "give exactly one of --module and --limit")
    if args.module:
        return realize_as_pure_image(inputs.module(args.module), test_class, _budget(args))
    lim = inputs.limit(args.limit)
    return realize_as_pure_image(lim, test_class, _budget(args, lim.budget))


def _cmd_epi(args: argparse.Namespace, inputs: Inputs) -> Any:
    h = hom_from_dict(loads(args.hom, "hom"), "hom")
    extra = [inputs.tuple(h.target, text, "extra") for text in args.extra]
    settings = load_settings(args.budget, args.preimage_bound, args.max_candidates)
    return uniform_pure_epi_check(h, parse_test_class(args.test_class), extra, settings)


def _cmd_demo(args: argparse.Namespace, _inputs: Inputs) -> Any:
    return run_demo(args.name)


HANDLERS: dict[str, Callable[[argparse.Namespace, Inputs], Any]] = {
    "eval": _cmd_eval,
    "implies": _cmd_implies,
    "equiv": _cmd_equiv,
    "dual": _cmd_dual,
    "freerealize": _cmd_freerealize,
    "pptype": _cmd_pptype,
    "qftype": _cmd_qftype,
    "purity": _cmd_purity,
    "tensor": _cmd_tensor,
    "herzog": _cmd_herzog,
    "chain": _cmd_chain,
    "limit": _cmd_limit,
    "separate": _cmd_separate,
    "realize": _cmd_realize,
    "epi": _cmd_epi,
    "demo": _cmd_demo,
}


# ============================================================================
# PARSER
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--class", dest="test_class", default="absolute",
                        help="absolute | flat | abspure | explicit:<file> (default: absolute)")
    common.add_argument("--budget", type=int, default=None,
                        help="stage budget (default: $PPCALC_BUDGET or 16)")
    common.add_argument("--format", dest="fmt", choices=FORMATS, default=JSON)
    common.add_argument("--session", help="session file for @name references")
    common.add_argument("--save-session", help="write the session and command log here")
    common.add_argument("--store", metavar="NAME", help="store the result in the session under NAME")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(prog="ppcalc", description="pp formulas over the integers")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    p = command("eval", "evaluate a formula in a module")
    p.add_argument("formula")
    p.add_argument("--module", required=True)

    for name, help_text in (("implies", "decide phi -> psi in a test class"),
                            ("equiv", "decide phi <-> psi in a test class")):
        p = command(name, help_text)
        p.add_argument("phi")
        p.add_argument("psi")

    for name, help_text in (("dual", "elementary dual of a formula"),
                            ("freerealize", "free realization of a formula")):
        p = command(name, help_text)
        p.add_argument("formula")

    for name, help_text in (("pptype", "formula generating the pp type of a tuple"),
                            ("qftype", "quantifier-free type of a tuple"),
                            ("purity", "is the generated submodule pure"),
                            ("separate", "close a tuple to a pure submodule")):
        p = command(name, help_text)
        p.add_argument("--module", required=True)
        p.add_argument("--tuple", required=True, help="JSON coordinate rows")

    for name, help_text in (("tensor", "tensor product of two modules"),
                            ("herzog", "certify vanishing of a tensor")):
        p = command(name, help_text)
        p.add_argument("--left", required=True)
        p.add_argument("--right", required=True)
        p.add_argument("--left-tuple", required=(name == "herzog"))
        p.add_argument("--right-tuple", required=(name == "herzog"))

    p = command("chain", "verify, build or arrange chains")
    p.add_argument("action", choices=("verify", "build", "arrange"))
    p.add_argument("--chain")
    p.add_argument("--module")

    p = command("limit", "tails of tuples in omega-limits")
    p.add_argument("action", choices=("tails", "stabilize"))
    p.add_argument("--limit", required=True)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--tuple", required=True, help="JSON coordinate rows in the start stage")

    p = command("realize", "realize a module or limit as a pure image")
    p.add_argument("--module")
    p.add_argument("--limit")

    p = command("epi", "search pure preimages along a surjection")
    p.add_argument("--hom", required=True, help='JSON {"source", "target", "matrix"}')
    p.add_argument("--extra", action="append", default=[], help="extra target tuple (repeatable)")
    p.add_argument("--preimage-bound", type=int, default=None)
    p.add_argument("--max-candidates", type=int, default=None)

    p = command("demo", "built-in worked examples")
    p.add_argument("name", choices=DEMOS)
    return parser


def _first_command(argv: Sequence[str]) -> Optional[str]:
    return next((a for a in argv if not a.startswith("-")), None)


def setup_logging(verbose: bool) -> None:
    level = os.environ.get(ENV_LOG_LEVEL) or ("INFO" if verbose else "WARNING")
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, datefmt=LOG_DATE_FORMAT, stream=sys.stderr)


def _exit_code(data: Any) -> int:
    if isinstance(data, dict):
        for key in PROPERTY_KEYS:
            if data.get(key) is False:
                return EXIT_PROPERTY_FAILS
    return EXIT_OK


def _store(session: Session, name: str, result: Any) -> None:
    if isinstance(result, ChainVerification):
        result = result.chain
    kinds: tuple[tuple[type, str], ...] = (
        (PpFormula, "formulas"), (FpModule, "modules"), (LChain, "chains"), (OmegaLimit, "limits"),
    )
    for cls, kind in kinds:
        if isinstance(result, cls):
            session.add(kind, name, result)
            return
    raise SessionSchemaError("--store", "result", f"cannot store a {type(result).__name__}")


def run_command(argv: Sequence[str]) -> int:
    """Run one command and print its report; returns the exit code."""
    argv = list(argv)
    command = _first_command(argv)
    if command is None and any(a in ("-h", "--help") for a in argv):
        build_parser().print_help()
        return EXIT_OK
    if command not in COMMANDS:
        print(f"ppcalc: unknown command {command!r}; choose from {', '.join(COMMANDS)}", file=sys.stderr)
        return EXIT_UNKNOWN_COMMAND

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT_ERROR
    setup_logging(args.verbose)

    try:
        session = load_session(args.session) if args.session else None
        if session is None and (args.save_session or args.store):
            session = Session()
        result = HANDLERS[args.command](args, Inputs(session))
        data = to_report(result)
        output = render(data, args.fmt)
        if session is not None:
            if args.store:
                _store(session, args.store, result)
            session.record(shlex.join(argv))
            if args.save_session:
                save_session(session, args.save_session)
    except (FormulaSyntaxError, MalformedJsonError) as e:
        logger.error(f"❌ {e}")
        print(f"ppcalc: parse error: {e}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except (PpCalcError, ValueError) as e:
        logger.error(f"❌ {e}")
        print(f"ppcalc: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    sys.stdout.write(output)
    return _exit_code(data)


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))
