"""JSON fixtures for the test suite."""
import json
from pathlib import Path
from typing import Any

FIXTURES_DIR = Path(__file__).parent


def load_fixture(fixture_name: str) -> Any:
    """Load a JSON fixture file from this directory.

    Args:
        fixture_name: Name of fixture file (e.g., 'module_pool.json')

    Returns:
        The decoded JSON document

    Example:
        >>> pool = load_fixture('module_pool.json')
    """
    fixture_path = FIXTURES_DIR / fixture_name
    if not fixture_path.exists():
        raise FileNotFoundError(f"Fixture not found: {fixture_name}")

    return json.loads(fixture_path.read_text(encoding="utf-8"))
