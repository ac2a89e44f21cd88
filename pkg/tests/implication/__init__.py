"""Implication relative to test classes."""
