"""
Rendering of results as JSON or text.

``to_report`` turns every result type of the library into plain JSON data.
Formulas carry their matrices (decimal strings) plus a ``text`` rendering in
the formula syntax; modules carry their invariant factors. The text format
walks the same data, so both formats always show the same certificates.
"""
import logging
from functools import singledispatch
from typing import Any

from ppcalc.chains import ChainVerification, LChain, PureImageRealization, StageTypeReport
from ppcalc.dsl import format_formula
from ppcalc.formulas import PointedModule, PpFormula, PpSubgroup
from ppcalc.herzog import HerzogResult
from ppcalc.implication import ImplicationVerdict, ImplicationWitness, TestClass
from ppcalc.limits import ImagePurityReport, OmegaLimit, StabilizationVerdict, family_description
from ppcalc.linalg import IntMatrix
from ppcalc.modules import FpHom, FpModule, ModuleTuple, TensorProduct
from ppcalc.purity import (
    PurityCertificate,
    QfExtension,
    QfPreservation,
    SeparationResult,
    TorsionCertificate,
    UniformEpiReport,
)
from ppcalc.serialization import dumps, encode_matrix, formula_to_dict, module_to_dict

logger = logging.getLogger(__name__)

JSON = "json"
TEXT = "text"
FORMATS = (JSON, TEXT)

# element lists are only listed for subgroups at most this large
MAX_LISTED_ELEMENTS = 256


@singledispatch
def to_report(obj: Any) -> Any:
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    raise TypeError(f"no report form for {type(obj).__name__}")


@to_report.register(dict)
def _(obj: dict) -> Any:
    return {str(k): to_report(v) for k, v in obj.items()}


@to_report.register(list)
@to_report.register(tuple)
def _(obj: Any) -> Any:
    return [to_report(v) for v in obj]


@to_report.register(IntMatrix)
def _(obj: IntMatrix) -> Any:
    return encode_matrix(obj)


@to_report.register(FpModule)
def _(obj: FpModule) -> Any:
    data = module_to_dict(obj)
    data["invariant_factors"] = [str(d) for d in obj.invariant_factors]
    data["structure"] = obj.describe()
    return data


@to_report.register(ModuleTuple)
def _(obj: ModuleTuple) -> Any:
    return {"module": to_report(obj.module), "coords": encode_matrix(obj.coords)}


@to_report.register(PointedModule)
def _(obj: PointedModule) -> Any:
    return {"module": to_report(obj.module), "tuple": encode_matrix(obj.tuple.coords)}


@to_report.register(FpHom)
def _(obj: FpHom) -> Any:
    return {
        "source": to_report(obj.source),
        "target": to_report(obj.target),
        "matrix": encode_matrix(obj.matrix),
        "surjective": obj.is_surjective(),
        "injective": obj.is_injective(),
    }


@to_report.register(TensorProduct)
def _(obj: TensorProduct) -> Any:
    return {"left": to_report(obj.left), "right": to_report(obj.right), "module": to_report(obj.module)}


@to_report.register(PpFormula)
def _(obj: PpFormula) -> Any:
    data = formula_to_dict(obj)
    data["text"] = format_formula(obj)
    return data


@to_report.register(TestClass)
def _(obj: TestClass) -> Any:
    return str(obj)


@to_report.register(PpSubgroup)
def _(obj: PpSubgroup) -> Any:
    data = {
        "module": to_report(obj.module),
        "arity": obj.arity,
        "generators": [encode_matrix(t.coords) for t in obj.generators()],
    }
    order = obj.module.order()
    if order and order ** obj.arity <= MAX_LISTED_ELEMENTS:
        data["elements"] = [encode_matrix(t.coords) for t in obj.elements()]
    return data


# ============================================================================
# VERDICTS AND CERTIFICATES
# ============================================================================

@to_report.register(ImplicationWitness)
def _(obj: ImplicationWitness) -> Any:
    return {
        "kind": obj.kind,
        "module": to_report(obj.module),
        "tuple": encode_matrix(obj.tuple.coords) if obj.tuple is not None else None,
        "member_index": obj.member_index,
    }


@to_report.register(ImplicationVerdict)
def _(obj: ImplicationVerdict) -> Any:
    return {"holds": obj.holds, "witness": to_report(obj.witness), "class": obj.test_class.kind}


@to_report.register(StabilizationVerdict)
def _(obj: StabilizationVerdict) -> Any:
    return {
        "stabilized": obj.stabilized,
        "stage": obj.stage,
        "formula": to_report(obj.formula),
        "chain": to_report(obj.chain),
        "chain_stages": list(obj.chain_stages),
        "class": str(obj.test_class),
        "budget_used": obj.budget_used,
    }


@to_report.register(LChain)
def _(obj: LChain) -> Any:
    return {
        "blocks": list(obj.blocks),
        "alphas": to_report(obj.alphas),
        "phis": to_report(obj.phis),
        "verified_for": sorted(str(c) for c in obj.verified_for),
        "realization": to_report(obj.realization),
    }


@to_report.register(ChainVerification)
def _(obj: ChainVerification) -> Any:
    return {
        "holds": obj.holds,
        "failing_index": obj.failing_index,
        "failing_indices": list(obj.failing_indices),
        "class": str(obj.test_class),
        "chain": to_report(obj.chain),
    }


@to_report.register(OmegaLimit)
def _(obj: OmegaLimit) -> Any:
    return {
        "family": family_description(obj),
        "budget": obj.budget,
        "stages": [to_report(obj.stage(k)) for k in range(obj.cached_stage_count())],
    }


@to_report.register(ImagePurityReport)
def _(obj: ImagePurityReport) -> Any:
    return {"holds": obj.holds, "class": str(obj.test_class), "failing": obj.failing()}


@to_report.register(StageTypeReport)
def _(obj: StageTypeReport) -> Any:
    return {
        "stage": obj.stage,
        "prefix": obj.prefix,
        "formula": to_report(obj.formula),
        "projection": to_report(obj.projection),
        "matches_projection": obj.matches_projection,
        "matches_phi": dict(sorted(obj.matches_phi.items())),
    }


@to_report.register(PureImageRealization)
def _(obj: PureImageRealization) -> Any:
    report = obj.report
    return {
        "holds": not report.find_problems(),
        "class": str(report.test_class),
        "chain": to_report(obj.chain),
        "stages": [
            {
                "stage": s.stage,
                "target_stage": s.target_stage,
                "surjective": s.surjective,
                "pure_on_generators": s.pure_on_generators,
                "injective": s.injective,
                "map": to_report(h),
            }
            for s, h in zip(report.stages, obj.maps)
        ],
        "compatible": report.compatible,
        "final_isomorphism": report.final_isomorphism,
        "problems": report.find_problems(),
    }


@to_report.register(PurityCertificate)
def _(obj: PurityCertificate) -> Any:
    return {
        "holds": obj.holds,
        "class": str(obj.test_class),
        "submodule_formula": to_report(obj.submodule_formula),
        "module_formula": to_report(obj.module_formula),
        "witness_module": to_report(obj.witness_module),
        "witness_tuple": encode_matrix(obj.witness_tuple.coords) if obj.witness_tuple else None,
        "note": obj.note,
    }


@to_report.register(SeparationResult)
def _(obj: SeparationResult) -> Any:
    return {
        "generators": encode_matrix(obj.gens.coords),
        "rounds": obj.rounds,
        "certificate": to_report(obj.certificate),
    }


@to_report.register(QfExtension)
def _(obj: QfExtension) -> Any:
    return {
        "extended": encode_matrix(obj.extended.coords),
        "qf_generator": to_report(obj.qf_generator),
        "certified": obj.certified,
    }


@to_report.register(UniformEpiReport)
def _(obj: UniformEpiReport) -> Any:
    return {
        "holds": obj.holds,
        "class": str(obj.test_class),
        "coefficient_bound": obj.coefficient_bound,
        "checks": [
            {
                "target": encode_matrix(c.target.coords),
                "preimage": encode_matrix(c.preimage.coords) if c.preimage else None,
                "candidates_tried": c.candidates_tried,
            }
            for c in obj.checks
        ],
    }


@to_report.register(QfPreservation)
def _(obj: QfPreservation) -> Any:
    return {"holds": obj.preserved, "mismatches": list(obj.mismatches)}


@to_report.register(TorsionCertificate)
def _(obj: TorsionCertificate) -> Any:
    return {
        "holds": obj.holds,
        "shortcut_applied": obj.shortcut_applied,
        "exponent": str(obj.exponent),
        "certificates": [{"generator": g, "formula": to_report(f)} for g, f in obj.certificates],
    }


@to_report.register(HerzogResult)
def _(obj: HerzogResult) -> Any:
    return {
        "zero": obj.zero,
        "witness": to_report(obj.witness),
        "holds_in_m": obj.holds_in_m,
        "dual_holds_in_n": obj.dual_holds_in_n,
        "tensor_coords": [str(v) for v in obj.tensor_coords],
    }


# ============================================================================
# RENDERING
# ============================================================================

def _is_formula(data: Any) -> bool:
    return isinstance(data, dict) and {"n", "m", "A", "B", "text"} <= data.keys()


def _is_module(data: Any) -> bool:
    return isinstance(data, dict) and "structure" in data and "invariant_factors" in data


def _text_lines(data: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines: list[str] = []
    if isinstance(data, dict):
        for key, value in data.items():
            if _is_formula(value):
                lines.append(f"{pad}{key}: {value['text']}")
            elif _is_module(value):
                lines.append(f"{pad}{key}: {value['structure']} (invariant factors {value['invariant_factors']})")
            elif isinstance(value, (dict, list)) and value and not _is_matrix(value):
                lines.append(f"{pad}{key}:")
                lines.extend(_text_lines(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_scalar(value)}")
    elif isinstance(data, list):
        for i, value in enumerate(data):
            if _is_formula(value):
                lines.append(f"{pad}[{i}] {value['text']}")
            elif isinstance(value, (dict, list)) and value and not _is_matrix(value):
                lines.append(f"{pad}[{i}]")
                lines.extend(_text_lines(value, indent + 1))
            else:
                lines.append(f"{pad}[{i}] {_scalar(value)}")
    else:
        lines.append(f"{pad}{_scalar(data)}")
    return lines


def _is_matrix(value: Any) -> bool:
    return isinstance(value, list) and all(isinstance(r, list) and all(isinstance(v, str) for v in r) for r in value)


def _scalar(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if value is None:
        return "-"
    if _is_matrix(value):
        return "[" + "; ".join(" ".join(r) for r in value) + "]"
    return str(value)


def render(data: Any, fmt: str = JSON) -> str:
    """Render report data from ``to_report`` as canonical JSON or indented text."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown report format {fmt!r}")
    if fmt == JSON:
        return dumps(data)
    return "\n".join(_text_lines(data)) + "\n"


def emit_report(result: Any, fmt: str = JSON) -> str:
    return render(to_report(result), fmt)
