"""Frames of multipliers in Hilbert modules over pro-C*-algebras, computed.

A pro-C*-algebra is modelled as a finite chain of block-diagonal matrix
algebras; modules, operators and frames live on top of that chain.
"""

from .algebra import AlgebraElement, BlockShape
from .errors import ProFrameError
from .frames import (
    Frame,
    FrameBounds,
    FrameOperatorBundle,
    bidual_check,
    canonical_dual,
    duality_check,
    frame_from_projection,
    frame_membership_boundedness,
    frame_operator,
    frame_sum,
    frame_transform,
    is_normalized,
    normalize,
    optimal_bounds,
    reconstruct,
    reconstruction_operator,
    scale_by_operator,
    standard_frame,
)
from .hilbert_module import (
    AdjointableOperator,
    ModuleElement,
    ModuleSpace,
    Multiplier,
    act,
    adjoint_op,
    apply,
    compose,
    inner,
    module_seminorm,
    operator_inverse,
    operator_seminorm,
    standard_basis,
)
from .prosystem import CoherentElement, SeminormChain, bounded_norm, project, seminorm

__version__ = "0.1.0"

__all__ = [
    "act",
    "adjoint_op",
    "AdjointableOperator",
    "AlgebraElement",
    "apply",
    "bidual_check",
    "BlockShape",
    "bounded_norm",
    "canonical_dual",
    "CoherentElement",
    "compose",
    "duality_check",
    "Frame",
    "frame_from_projection",
    "frame_membership_boundedness",
    "frame_operator",
    "frame_sum",
    "frame_transform",
    "FrameBounds",
    "FrameOperatorBundle",
    "inner",
    "is_normalized",
    "module_seminorm",
    "ModuleElement",
    "ModuleSpace",
    "Multiplier",
    "normalize",
    "operator_inverse",
    "operator_seminorm",
    "optimal_bounds",
    "ProFrameError",
    "project",
    "reconstruct",
    "reconstruction_operator",
    "scale_by_operator",
    "seminorm",
    "SeminormChain",
    "standard_basis",
    "standard_frame",
]
