"""Elimination distance to minor-closed classes by dynamic programming on tree decompositions."""

from elimdist.graph import Graph
from elimdist.minors import ObstructionFamily, family_from_spec, in_exc, is_minor, preset

__all__ = ["Graph", "ObstructionFamily", "family_from_spec", "in_exc", "is_minor", "preset"]
__version__ = "0.1.0"
