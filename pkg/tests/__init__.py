"""Test suites for ppcalc, one package per area (linalg, modules, formulas, implication, engine, cli)."""
