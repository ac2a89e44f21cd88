"""
Shared defaults for ppcalc.

Values here are the built-in defaults; ``ppcalc.config`` layers environment
variables and command-line flags on top of them.
"""

# Stage budget for omega-limits, tail scans and witness closure
DEFAULT_BUDGET: int = 16

# Coefficient bound for preimage searches when the source has no torsion
DEFAULT_PREIMAGE_BOUND: int = 4

# Hard ceiling on kernel-coset candidates tried per tuple
DEFAULT_MAX_PREIMAGE_CANDIDATES: int = 4096

# Environment variables
ENV_BUDGET: str = "PPCALC_BUDGET"
ENV_PREIMAGE_BOUND: str = "PPCALC_PREIMAGE_BOUND"
ENV_MAX_CANDIDATES: str = "PPCALC_MAX_CANDIDATES"
ENV_LOG_LEVEL: str = "PPCALC_LOG_LEVEL"

# Log format shared by the CLI and the pytest live log
LOG_FORMAT: str = "%(asctime)s [%(levelname)8s] %(message)s"
LOG_DATE_FORMAT: str = "%Y-%m-%d %H:%M:%S"

# CLI exit codes
EXIT_OK: int = 0
EXIT_PROPERTY_FAILS: int = 1
EXIT_INPUT_ERROR: int = 2
EXIT_UNKNOWN_COMMAND: int = 64
EXIT_PARSE_ERROR: int = 65

# Names accepted by --class
CLASS_NAMES: tuple[str, ...] = ("absolute", "flat", "abspure", "explicit")
