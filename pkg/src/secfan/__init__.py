"""Exact secondary fans for del Pezzo anticanonical pairs.

Subpackages cover integer lattice algebra, rational polyhedral cones and fans,
del Pezzo Picard lattices, the secondary-fan pipeline with its GKZ oracle,
umbrella theta algebras, integral-affine spines, and toric fiber bundles.
"""

__version__ = "0.1.0"
