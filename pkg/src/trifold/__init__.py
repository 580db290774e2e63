"""Threefolds isogenous to a product of curves of mixed type.

Finite groups, generating vectors, Chevalley-Weil characters and Hodge
diamonds, put together into a classification driver.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .catalog import builtin_catalog, default_catalog, identify, make_named
from .groups import GroupTable
from .hodge import HodgeDiamond, hodge_diamond
from .numdata import admissible_numerical_data
from .pipeline import AlgebraicDatum, ClassifiedRow, classify
from .riemann import BranchType, GeneratingVector

__all__ = [
    "AlgebraicDatum", "BranchType", "ClassifiedRow", "GeneratingVector", "GroupTable",
    "HodgeDiamond", "admissible_numerical_data", "builtin_catalog", "classify",
    "default_catalog", "hodge_diamond", "identify", "make_named",
]
