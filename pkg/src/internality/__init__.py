"""Categorical internality over finite structures.

Binding groups are computed as ends of functors between categories of
definable sets and cross-checked against automorphism groups found by
brute force.
"""
from .fincat import CapacityError, CategoryError, FinCategory
from .groups import FiniteGroup, groups_isomorphic

__version__ = "0.1.0"

__all__ = ["CapacityError", "CategoryError", "FinCategory", "FiniteGroup", "groups_isomorphic", "__version__"]
