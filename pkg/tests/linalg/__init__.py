"""Integer matrices, normal forms, lattices and linear systems."""
