"""Discrete-time phytoplankton-zooplankton map with Holling type II/III grazing."""
from phytozoo.errors import DomainError, MapOverflowError, PreconditionError, RegimeError
from phytozoo.fixed_points import FixedPoint, all_fixed_points, existence_verdict, positive_fixed_points
from phytozoo.model import Params, State, apply_map
from phytozoo.stability import classify

__all__ = [
    "DomainError",
    "FixedPoint",
    "MapOverflowError",
    "Params",
    "PreconditionError",
    "RegimeError",
    "State",
    "all_fixed_points",
    "apply_map",
    "classify",
    "existence_verdict",
    "positive_fixed_points",
]
