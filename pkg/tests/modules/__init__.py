"""Finitely presented modules, tuples and homomorphisms."""
