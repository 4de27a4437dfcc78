"""Elliptic-element trees, excision intervals, and the McShane identity.

Library layout:

  scalars     exact rationals / quadratic surds / p-bit reals
  moebius     2x2 real matrices on the upper half-plane, uplift regions
  fricke      trace parameters, adjusted triples, the two-rooted move tree
  identity    excision intervals on Y = a/2 and the identity sum
  cantor      complement gaps, box counting, branch-ratio limits
  render      SVG figures
  properties  runtime invariant suites
  cli         command-line front end
"""

from .cantor import (
    BranchSpec,
    GapSet,
    box_count,
    box_dimension_estimate,
    branch_ratio,
    build_gaps,
    dimension_scale_ladder,
    growth_bound_check,
    limit_ratio_constant_branch,
    middle_thirds_gaps,
    ratio_convergence_scan,
)
from .errors import ExcisionError
from .fricke import (
    Budget,
    FrickeParams,
    TreeNode,
    apply_move,
    apply_move_matrices,
    adjusted_residual,
    enumerate_tree,
    minimal_triple,
    root_node,
    solve_c,
    validate_params,
    walk_path,
)
from .identity import (
    ExcisionInterval,
    SumReport,
    ambient_interval,
    excision_interval,
    excision_width,
    geodesic_length,
    interval_layout,
    length_spectrum,
    lower_crossing_height,
    mcshane_sum,
    summand,
    upper_crossing_height,
)
from .moebius import (
    Circle,
    HLine,
    HeightEffect,
    Mat2,
    Point,
    RegionPosition,
    apex_of_pair,
    axis,
    fixed_point,
    generator_matrices,
    image_circle,
    isometric_circle,
    mobius_apply,
    orthogonal_circles,
    raises_height,
    uplift_classify,
)
from .render import SceneSpec, render_scene
from .scalars import Context, Surd

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
