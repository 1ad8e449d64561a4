"""Constrained two-population segregation dynamics.

A library and CLI for a piecewise-smooth planar map modeling two groups
entering and leaving a shared system under entry caps: exact map evaluation,
one-dimensional restrictions, fixed-point census, border-collision
bifurcation curves, parameter sweeps and basin rasters.
"""
from .params import ModelParams, canonical, symmetric
from .mapcore import (
    CurveSample,
    RegionId,
    State,
    border_curves,
    eval_F,
    orbit,
    region_of,
    step,
    tolerance,
)
from .restrict import (
    LineInvariantBounds,
    NoReturnError,
    PiecewiseMap1D,
    ReturnMapSpec,
    build_restriction,
    derivative_1d,
    eval_1d,
    first_return,
    flat_branch_interval,
    g_return_spec,
    line_invariant_bounds,
    return_map_G,
)
from .equilibria import (
    Family,
    FixedPointRecord,
    StabilityClass,
    enumerate_fixed_points,
    jacobian_smooth,
    reaction_curves,
    stability_of,
)
from .bcb import (
    CycleRecord,
    DiagonalThresholds,
    NoRootError,
    bcb_2cycle_saddle_node,
    bcb_equilibrium_curves,
    bcb_smoothness_curves,
    bcb_sn2_curve,
    bce1_k2,
    bce2_k1,
    bcp1_k1,
    bcp2_k2,
    diagonal_thresholds,
    find_cycles_1d,
    symbolic_itinerary,
)
from .sweep import (
    AttractorLabel,
    BasinRaster,
    PeriodGrid,
    ScanConfig,
    Slice1D,
    attractor_scan,
    basins,
    sweep1d,
    sweep2d,
)

__all__ = [
    "ModelParams",
    "canonical",
    "symmetric",
    "CurveSample",
    "RegionId",
    "State",
    "border_curves",
    "eval_F",
    "orbit",
    "region_of",
    "step",
    "tolerance",
    "LineInvariantBounds",
    "NoReturnError",
    "PiecewiseMap1D",
    "ReturnMapSpec",
    "build_restriction",
    "derivative_1d",
    "eval_1d",
    "first_return",
    "flat_branch_interval",
    "g_return_spec",
    "line_invariant_bounds",
    "return_map_G",
    "Family",
    "FixedPointRecord",
    "StabilityClass",
    "enumerate_fixed_points",
    "jacobian_smooth",
    "reaction_curves",
    "stability_of",
    "CycleRecord",
    "DiagonalThresholds",
    "NoRootError",
    "bcb_2cycle_saddle_node",
    "bcb_equilibrium_curves",
    "bcb_smoothness_curves",
    "bcb_sn2_curve",
    "bce1_k2",
    "bce2_k1",
    "bcp1_k1",
    "bcp2_k2",
    "diagonal_thresholds",
    "find_cycles_1d",
    "symbolic_itinerary",
    "AttractorLabel",
    "BasinRaster",
    "PeriodGrid",
    "ScanConfig",
    "Slice1D",
    "attractor_scan",
    "basins",
    "sweep1d",
    "sweep2d",
]
