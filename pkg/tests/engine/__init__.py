"""Purity, tensors, omega-limits, chains and realizations."""
