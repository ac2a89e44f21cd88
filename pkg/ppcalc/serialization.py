"""
JSON encoding of matrices, modules, tuples, formulas, chains and limits.

Matrices are written as arrays of arrays of decimal integer strings so that
entries beyond 64 bits survive any JSON reader. Decoders accept plain JSON
integers too, which keeps hand-written inputs short.

Decoding errors raise ``SessionSchemaError`` naming the document (``path``)
and the offending field.
"""
import json
import logging
from typing import Any, Callable, Mapping, Optional

from ppcalc.chains import LChain
from ppcalc.errors import MalformedJsonError, SessionSchemaError
from ppcalc.formulas import PpFormula
from ppcalc.implication import EXPLICIT, TestClass
from ppcalc.limits import CYCLIC_SUM, EXPLICIT_CHAIN, FROM_CHAIN, PRUFER, OmegaLimit
from ppcalc.linalg import IntMatrix
from ppcalc.modules import FpHom, FpModule, ModuleTuple, check_hom, present_module

logger = logging.getLogger(__name__)

INPUT = "<input>"


# ============================================================================
# PRIMITIVES
# ============================================================================

def encode_matrix(m: IntMatrix) -> list[list[str]]:
    return [[str(v) for v in row] for row in m.entries]


def _decode_int(value: Any, path: str, field: str) -> int:
    if isinstance(value, bool):
        raise SessionSchemaError(path, field, "expected an integer, got a boolean")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value, 10)
        except ValueError as e:
            raise SessionSchemaError(path, field, f"not a decimal integer: {value!r}") from e
    raise SessionSchemaError(path, field, f"expected an integer, got {type(value).__name__}")


def decode_matrix(data: Any, cols: Optional[int] = None, path: str = INPUT, field: str = "matrix") -> IntMatrix:
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise SessionSchemaError(path, field, "expected an array of arrays")
    rows = [[_decode_int(v, path, f"{field}[{i}][{j}]") for j, v in enumerate(r)] for i, r in enumerate(data)]
    widths = {len(r) for r in rows}
    if cols is not None:
        widths.add(cols)
    if len(widths) > 1:
        raise SessionSchemaError(path, field, f"rows have different lengths {sorted(widths)}")
    return IntMatrix.from_rows(rows, cols)


def _require(data: Any, key: str, path: str) -> Any:
    if not isinstance(data, Mapping):
        raise SessionSchemaError(path, key, "expected a JSON object")
    if key not in data:
        raise SessionSchemaError(path, key, "missing")
    return data[key]


def loads(text: str, path: str = INPUT) -> Any:
    """``json.loads`` that reports the document name on malformed input."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise MalformedJsonError(path, "<document>", f"malformed JSON: {e.msg} at {e.pos}") from e


# ============================================================================
# MODULES, TUPLES, MAPS
# ============================================================================

def module_to_dict(m: FpModule) -> dict[str, Any]:
    return {"gens": m.num_gens, "relations": encode_matrix(m.relation_matrix)}


def module_from_dict(data: Any, path: str = INPUT) -> FpModule:
    k = _decode_int(_require(data, "gens", path), path, "gens")
    if k < 0:
        raise SessionSchemaError(path, "gens", "must be nonnegative")
    relations = decode_matrix(data.get("relations", []), k, path, "relations")
    return present_module(k, relations)


def tuple_to_dict(t: ModuleTuple, module_ref: Optional[str] = None) -> dict[str, Any]:
    module: Any = module_ref if module_ref is not None else module_to_dict(t.module)
    return {"module": module, "coords": encode_matrix(t.coords)}


def tuple_from_dict(
    data: Any,
    path: str = INPUT,
    resolve: Optional[Callable[[str], FpModule]] = None,
) -> ModuleTuple:
    """Decode a tuple whose ``module`` is a module object or an ``@name`` reference."""
    raw = _require(data, "module", path)
    if isinstance(raw, str):
        if resolve is None:
            raise SessionSchemaError(path, "module", f"reference {raw!r} needs a session")
        module = resolve(raw)
    else:
        module = module_from_dict(raw, path)
    coords = decode_matrix(_require(data, "coords", path), module.num_gens, path, "coords")
    return ModuleTuple.of(module, coords.entries)


def hom_to_dict(h: FpHom) -> dict[str, Any]:
    return {
        "source": module_to_dict(h.source),
        "target": module_to_dict(h.target),
        "matrix": encode_matrix(h.matrix),
    }


def hom_from_dict(data: Any, path: str = INPUT) -> FpHom:
    source = module_from_dict(_require(data, "source", path), path)
    target = module_from_dict(_require(data, "target", path), path)
    matrix = decode_matrix(_require(data, "matrix", path), target.num_gens, path, "matrix")
    return check_hom(source, target, matrix)


# ============================================================================
# FORMULAS AND CLASSES
# ============================================================================

def formula_to_dict(phi: PpFormula) -> dict[str, Any]:
    return {"n": phi.n, "m": phi.m, "A": encode_matrix(phi.a), "B": encode_matrix(phi.b)}


def formula_from_dict(data: Any, path: str = INPUT) -> PpFormula:
    n = _decode_int(_require(data, "n", path), path, "n")
    m = _decode_int(_require(data, "m", path), path, "m")
    a = decode_matrix(_require(data, "A", path), n, path, "A")
    b = decode_matrix(_require(data, "B", path), m, path, "B")
    if a.rows != b.rows:
        raise SessionSchemaError(path, "B", f"{b.rows} rows, A has {a.rows}")
    return PpFormula(n, m, a, b)


def class_to_dict(test_class: TestClass) -> dict[str, Any]:
    data: dict[str, Any] = {"kind": test_class.kind}
    if test_class.kind == EXPLICIT:
        data["modules"] = [module_to_dict(m) for m in test_class.modules]
    return data


def class_from_dict(data: Any, path: str = INPUT) -> TestClass:
    kind = _require(data, "kind", path)
    modules = [module_from_dict(m, path) for m in data.get("modules", [])]
    try:
        return TestClass(kind, tuple(modules))
    except ValueError as e:
        raise SessionSchemaError(path, "kind", str(e)) from e


def explicit_modules_from_json(data: Any, path: str = INPUT) -> list[FpModule]:
    """Module list of an ``explicit:<file>`` class: an array, or ``{"modules": [...]}``."""
    if isinstance(data, Mapping):
        data = _require(data, "modules", path)
    if not isinstance(data, list) or not data:
        raise SessionSchemaError(path, "modules", "expected a nonempty array of modules")
    return [module_from_dict(m, path) for m in data]


# ============================================================================
# CHAINS AND LIMITS
# ============================================================================

def chain_to_dict(c: LChain) -> dict[str, Any]:
    data: dict[str, Any] = {
        "blocks": list(c.blocks),
        "alphas": [formula_to_dict(a) for a in c.alphas],
        "verified_for": sorted((class_to_dict(tc) for tc in c.verified_for), key=json.dumps),
    }
    if c.realization is not None:
        data["realization"] = tuple_to_dict(c.realization)
    return data


def chain_from_dict(data: Any, path: str = INPUT) -> LChain:
    blocks = [_decode_int(b, path, "blocks") for b in _require(data, "blocks", path)]
    alphas = [formula_from_dict(a, path) for a in _require(data, "alphas", path)]
    verified = frozenset(class_from_dict(tc, path) for tc in data.get("verified_for", []))
    realization = tuple_from_dict(data["realization"], path) if "realization" in data else None
    return LChain(tuple(blocks), tuple(alphas), verified, realization)


def limit_to_dict(lim: OmegaLimit) -> dict[str, Any]:
    """Family parameters plus the number of stages already cached.

    Explicit limits carry every stage and map.
    """
    if lim.family == EXPLICIT_CHAIN:
        return {
            "stages": [module_to_dict(lim.stage(k)) for k in range(lim.budget + 1)],
            "maps": [encode_matrix(lim.connecting_map(k).matrix) for k in range(lim.budget)],
        }
    data: dict[str, Any] = {"family": lim.family, "budget": lim.budget, "cached_stages": lim.cached_stage_count()}
    if lim.family == PRUFER:
        data["p"] = lim.params["p"]
    elif lim.family == CYCLIC_SUM:
        data["orders"] = [str(r) for r in lim.params["orders"]]
    elif lim.family == FROM_CHAIN:
        assert lim.chain is not None
        data["chain"] = chain_to_dict(lim.chain)
    return data


def limit_from_dict(data: Any, path: str = INPUT) -> OmegaLimit:
    if isinstance(data, Mapping) and "stages" in data:
        stages = [module_from_dict(s, path) for s in data["stages"]]
        raw_maps = _require(data, "maps", path)
        if len(raw_maps) != max(len(stages) - 1, 0):
            raise SessionSchemaError(path, "maps", f"{len(stages)} stages need {len(stages) - 1} maps")
        maps = [
            check_hom(stages[k], stages[k + 1], decode_matrix(raw, stages[k + 1].num_gens, path, f"maps[{k}]"))
            for k, raw in enumerate(raw_maps)
        ]
        return OmegaLimit.explicit(stages, maps)

    family = _require(data, "family", path)
    budget = _decode_int(_require(data, "budget", path), path, "budget")
    if family == PRUFER:
        lim = OmegaLimit.prufer(_decode_int(_require(data, "p", path), path, "p"), budget)
    elif family == CYCLIC_SUM:
        orders = [_decode_int(r, path, "orders") for r in _require(data, "orders", path)]
        lim = OmegaLimit.cyclic_sum(orders, budget)
    elif family == FROM_CHAIN:
        lim = OmegaLimit.from_chain(chain_from_dict(_require(data, "chain", path), path), budget)
    else:
        raise SessionSchemaError(path, "family", f"unknown family {family!r}")
    cached = _decode_int(data.get("cached_stages", 0), path, "cached_stages")
    if cached:
        lim.materialize(min(cached, budget + 1) - 1)
    return lim


def dumps(data: Any) -> str:
    """Canonical rendering: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

