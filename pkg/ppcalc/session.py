"""
Named objects shared between CLI invocations.

A session maps names to formulas, modules, chains and limits (one namespace
per kind) and keeps a log of the commands that touched it. Inputs refer to
session objects as ``@name``.
"""
import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

from ppcalc.chains import LChain
from ppcalc.errors import DuplicateNameError, SessionSchemaError
from ppcalc.formulas import PpFormula
from ppcalc.limits import OmegaLimit
from ppcalc.modules import FpModule
from ppcalc.serialization import (
    chain_from_dict,
    chain_to_dict,
    dumps,
    formula_from_dict,
    formula_to_dict,
    limit_from_dict,
    limit_to_dict,
    loads,
    module_from_dict,
    module_to_dict,
)

logger = logging.getLogger(__name__)

SESSION_VERSION = 1
KINDS = ("formulas", "modules", "chains", "limits")

SessionObject = Union[PpFormula, FpModule, LChain, OmegaLimit]


@dataclass
class Session:
    formulas: dict[str, PpFormula] = field(default_factory=dict)
    modules: dict[str, FpModule] = field(default_factory=dict)
    chains: dict[str, LChain] = field(default_factory=dict)
    limits: dict[str, OmegaLimit] = field(default_factory=dict)
    log: list[str] = field(default_factory=list)

    def _table(self, kind: str) -> dict[str, Any]:
        if kind not in KINDS:
            raise ValueError(f"unknown session kind {kind!r}")
        table: dict[str, Any] = getattr(self, kind)
        return table

    def add(self, kind: str, name: str, obj: SessionObject) -> None:
        table = self._table(kind)
        if name in table:
            raise DuplicateNameError(f"{kind} already has an entry named {name!r}")
        table[name] = obj
        logger.debug(f"session: added {kind[:-1]} {name!r}")

    def get(self, kind: str, ref: str) -> Any:
        """Look up ``name`` or ``@name`` in the namespace ``kind``."""
        name = ref[1:] if ref.startswith("@") else ref
        table = self._table(kind)
        if name not in table:
            raise SessionSchemaError("<session>", kind, f"no entry named {name!r}")
        return table[name]

    def record(self, command: str) -> None:
        self.log.append(command)

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": SESSION_VERSION,
            "formulas": {k: formula_to_dict(v) for k, v in self.formulas.items()},
            "modules": {k: module_to_dict(v) for k, v in self.modules.items()},
            "chains": {k: chain_to_dict(v) for k, v in self.chains.items()},
            "limits": {k: limit_to_dict(v) for k, v in self.limits.items()},
            "log": list(self.log),
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "<session>") -> "Session":
        if not isinstance(data, dict):
            raise SessionSchemaError(path, "<document>", "expected a JSON object")
        version = data.get("version", SESSION_VERSION)
        if version != SESSION_VERSION:
            raise SessionSchemaError(path, "version", f"unsupported version {version!r}")
        for kind in KINDS:
            if not isinstance(data.get(kind, {}), dict):
                raise SessionSchemaError(path, kind, "expected an object of named entries")
        log = data.get("log", [])
        if not isinstance(log, list) or not all(isinstance(c, str) for c in log):
            raise SessionSchemaError(path, "log", "expected an array of strings")
        return cls(
            formulas={k: formula_from_dict(v, path) for k, v in data.get("formulas", {}).items()},
            modules={k: module_from_dict(v, path) for k, v in data.get("modules", {}).items()},
            chains={k: chain_from_dict(v, path) for k, v in data.get("chains", {}).items()},
            limits={k: limit_from_dict(v, path) for k, v in data.get("limits", {}).items()},
            log=list(log),
        )

    def fingerprint(self) -> str:
        """SHA-256 of the canonical JSON rendering."""
        return hashlib.sha256(dumps(self.to_dict()).encode("utf-8")).hexdigest()


def load_session(path: Union[str, Path]) -> Session:
    """Read a session file.

    Raises:
        SessionSchemaError: the file is unreadable, malformed or misses a field
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SessionSchemaError(str(path), "<file>", f"cannot read: {e.strerror}") from e
    session = Session.from_dict(loads(text, str(path)), str(path))
    logger.info(f"✓ loaded session {path} ({session.fingerprint()[:12]})")
    return session


def save_session(session: Session, path: Union[str, Path]) -> None:
    path = Path(path)
    try:
        path.write_text(dumps(session.to_dict()), encoding="utf-8")
    except OSError as e:
        raise SessionSchemaError(str(path), "<file>", f"cannot write: {e.strerror}") from e
    logger.info(f"✓ saved session {path} ({session.fingerprint()[:12]})")
