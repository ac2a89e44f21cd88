"""
Runtime settings.

Resolution order for every setting: explicit argument (usually a CLI flag),
then the environment variable, then the built-in default.
"""
import logging
import os
from dataclasses import dataclass
from typing import Optional

from ppcalc.constants import (
    DEFAULT_BUDGET,
    DEFAULT_MAX_PREIMAGE_CANDIDATES,
    DEFAULT_PREIMAGE_BOUND,
    ENV_BUDGET,
    ENV_MAX_CANDIDATES,
    ENV_PREIMAGE_BOUND,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Settings:
    budget: int = DEFAULT_BUDGET
    preimage_bound: int = DEFAULT_PREIMAGE_BOUND
    max_preimage_candidates: int = DEFAULT_MAX_PREIMAGE_CANDIDATES


def _resolve_int(explicit: Optional[int], env_var: str, default: int) -> int:
    if explicit is not None:
        value = explicit
        source = "argument"
    elif os.environ.get(env_var):
        raw = os.environ[env_var]
        try:
            value = int(raw)
        except ValueError as e:
            raise ValueError(f"{env_var} must be an integer, got {raw!r}") from e
        source = f"env {env_var}"
    else:
        value = default
        source = "default"
    if value < 0:
        raise ValueError(f"{env_var.lower()} must be nonnegative, got {value}")
    logger.debug(f"{env_var}={value} (from {source})")
    return value


def resolve_budget(explicit: Optional[int] = None) -> int:
    """Stage budget: ``--budget`` > ``PPCALC_BUDGET`` > 16."""
    return _resolve_int(explicit, ENV_BUDGET, DEFAULT_BUDGET)


def load_settings(
    budget: Optional[int] = None,
    preimage_bound: Optional[int] = None,
    max_preimage_candidates: Optional[int] = None,
) -> Settings:
    """Build a ``Settings`` from explicit values, the environment and defaults."""
    return Settings(
        budget=resolve_budget(budget),
        preimage_bound=_resolve_int(preimage_bound, ENV_PREIMAGE_BOUND, DEFAULT_PREIMAGE_BOUND),
        max_preimage_candidates=_resolve_int(
            max_preimage_candidates, ENV_MAX_CANDIDATES, DEFAULT_MAX_PREIMAGE_CANDIDATES
        ),
    )
