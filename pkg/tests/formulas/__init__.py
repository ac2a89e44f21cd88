"""pp formulas: syntax, evaluation, realizations and duality."""
