"""
Exception hierarchy for ppcalc.

Every error raised on purpose by the library derives from ``PpCalcError`` so
callers (the CLI in particular) can map failures to exit codes in one place.
"""
from typing import Any, Optional


class PpCalcError(Exception):
    """Base class for all ppcalc errors."""


class DimensionError(PpCalcError, ValueError):
    """Matrix, tuple or formula shapes do not fit together."""


class IllDefinedHomError(PpCalcError):
    """A candidate homomorphism sends a source relator outside the target relations."""

    def __init__(self, relator_index: int, image: tuple[int, ...]):
        self.relator_index = relator_index
        self.image = image
        super().__init__(
            f"relator {relator_index} maps to {list(image)}, "
            f"which is not in the target relation lattice"
        )


class FormulaSyntaxError(PpCalcError):
    """The formula text does not follow the DSL grammar."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnboundVariableError(FormulaSyntaxError):
    """A bound variable is used without being declared in the ``E`` prefix."""


class CoefficientError(FormulaSyntaxError):
    """A coefficient is not an integer, or an equation has a nonzero constant."""


class MalformedChainError(PpCalcError):
    """Block lengths and chain formulas disagree."""


class ChainNotVerifiedError(PpCalcError):
    """An operation needs a chain verified for some test class first."""


class StageOutOfRangeError(PpCalcError, IndexError):
    """A stage index lies outside the budget of an omega-limit."""


class BudgetExhaustedError(PpCalcError):
    """An iterative procedure ran out of budget; ``partial`` holds what was built."""

    def __init__(self, message: str, partial: Optional[Any] = None):
        self.partial = partial
        super().__init__(message)


class NotSurjectiveError(PpCalcError):
    """A map expected to be an epimorphism misses part of its target."""


class InfiniteModuleError(PpCalcError):
    """Element enumeration was requested for a module with free rank."""


class SessionSchemaError(PpCalcError):
    """A session or input JSON document is unreadable or misses a field."""

    def __init__(self, path: str, field: str, message: str):
        self.path = path
        self.field = field
        super().__init__(f"{path}: field '{field}': {message}")


class DuplicateNameError(PpCalcError):
    """A session already holds an object of that kind under that name."""


class MalformedJsonError(SessionSchemaError):
    """A JSON document could not be parsed at all."""
