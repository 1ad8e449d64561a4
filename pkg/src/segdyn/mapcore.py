"""Core map evaluation: unconstrained pair (F1, F2), region ids, clamped step.

The state (x1, x2) holds the number of agents of each group currently in the
system.  Group i wants to enter as long as the opposite group is below its
tolerance x_i * R_i(x_i); entry and exit are capped so the realized step is
the componentwise clamp of (F1, F2) to [0, K1] x [0, K2].  The plane splits
into nine regions by the sign/cap pattern of (F1, F2); the map is continuous
but not differentiable on the four border curves where a clamp activates.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .params import ModelParams

State = tuple[float, float]

#: default phase-plane plotting window (x1_min, x1_max, x2_min, x2_max)
DEFAULT_WINDOW = (0.0, 2.0, 0.0, 2.0)


class RegionId(IntEnum):
    """Sign/cap pattern of (F1, F2); lowest id wins on shared boundaries.

    R1: both components free.          R2: x1 floored, x2 free.
    R3: both floored (image = origin). R4: x1 floored, x2 capped.
    R5: x1 capped, x2 free.            R6: x1 capped, x2 floored.
    R7: both capped (image = corner).  R8: x1 free, x2 floored.
    R9: x1 free, x2 capped.
    """

    R1 = 1
    R2 = 2
    R3 = 3
    R4 = 4
    R5 = 5
    R6 = 6
    R7 = 7
    R8 = 8
    R9 = 9


@dataclass(frozen=True)
class CurveSample:
    """Sampled border curve; every point satisfies F_i = 0 or F_i = K_i."""

    curve_id: str  # one of BC1_0, BC2_0, BC1_K, BC2_K
    points: np.ndarray  # shape (m, 2)


def tolerance(params: ModelParams, i: int, x: float) -> float:
    """Per-capita tolerance ratio tau_i (1 - x/N_i); negative above N_i."""
    if i == 1:
        return params.tau1 * (1.0 - x / params.n1)
    if i == 2:
        return params.tau2 * (1.0 - x / params.n2)
    raise ValueError(f"group index must be 1 or 2, got {i!r}")


def eval_F(params: ModelParams, state: State) -> tuple[float, float]:
    """Unconstrained image; kept in factored form so border identities are
    exact to rounding."""
    x1, x2 = state
    f1 = x1 * (1.0 - params.gamma1 * x2
               + params.gamma1 * params.tau1 * x1 * (1.0 - x1 / params.n1))
    f2 = x2 * (1.0 - params.gamma2 * x1
               + params.gamma2 * params.tau2 * x2 * (1.0 - x2 / params.n2))
    return f1, f2


def region_of(params: ModelParams, state: State) -> RegionId:
    """Region id of the point; inclusive inequalities, lowest id on ties."""
    f1, f2 = eval_F(params, state)
    lo1, hi1 = f1 <= 0.0, f1 >= params.k1
    lo2, hi2 = f2 <= 0.0, f2 >= params.k2
    mid1 = 0.0 <= f1 <= params.k1
    mid2 = 0.0 <= f2 <= params.k2
    if mid1 and mid2:
        return RegionId.R1
    if lo1 and mid2:
        return RegionId.R2
    if lo1 and lo2:
        return RegionId.R3
    if lo1 and hi2:
        return RegionId.R4
    if hi1 and mid2:
        return RegionId.R5
    if hi1 and lo2:
        return RegionId.R6
    if hi1 and hi2:
        return RegionId.R7
    if mid1 and lo2:
        return RegionId.R8
    return RegionId.R9


def step(params: ModelParams, state: State) -> State:
    """One application of the capped map; the result lies in D."""
    f1, f2 = eval_F(params, state)
    # + 0.0 normalizes IEEE -0.0 (max(-0.0, 0.0) keeps the sign bit)
    return (
        min(max(f1, 0.0), params.k1) + 0.0,
        min(max(f2, 0.0), params.k2) + 0.0,
    )


def orbit(params: ModelParams, state: State, n: int) -> list[State]:
    """[state, T(state), ..., T^n(state)]; length n + 1."""
    if n < 0:
        raise ValueError(f"orbit length must be >= 0, got {n}")
    points = [state]
    current = state
    for _ in range(n):
        current = step(params, current)
        points.append(current)
    return points


def step_arrays(
    x1: np.ndarray,
    x2: np.ndarray,
    params: ModelParams,
    k1=None,
    k2=None,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized step over arrays of states.

    k1/k2 may be arrays broadcasting against the state (parameter sweeps vary
    the caps per element).  The expression mirrors eval_F term by term so the
    scalar and the vectorized paths produce bitwise identical floats.
    """
    if k1 is None:
        k1 = params.k1
    if k2 is None:
        k2 = params.k2
    f1 = x1 * (1.0 - params.gamma1 * x2
               + params.gamma1 * params.tau1 * x1 * (1.0 - x1 / params.n1))
    f2 = x2 * (1.0 - params.gamma2 * x1
               + params.gamma2 * params.tau2 * x2 * (1.0 - x2 / params.n2))
    return np.clip(f1, 0.0, k1) + 0.0, np.clip(f2, 0.0, k2) + 0.0


def _curve_grid(lo: float, hi: float, resolution: int) -> np.ndarray:
    return np.linspace(lo, hi, resolution)


def border_curves(
    params: ModelParams,
    resolution: int,
    window: tuple[float, float, float, float] = DEFAULT_WINDOW,
) -> list[CurveSample]:
    """Sample the four curves where a clamp activates (F_i = 0 or K_i).

    BC1_K / BC2_K exclude the singular abscissa 0; all curves are clipped to
    the plotting window.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    x1_lo, x1_hi, x2_lo, x2_hi = window
    g1, g2 = params.gamma1, params.gamma2
    out: list[CurveSample] = []

    def keep(xs, ys, ylo, yhi):
        pts = np.column_stack([xs, ys])
        mask = (ys >= ylo) & (ys <= yhi)
        return pts[mask]

    # cap border of group 1: F1 = K1, solved for x2 as a function of x1 > 0
    x1 = _curve_grid(x1_lo, x1_hi, resolution)
    x1 = x1[x1 > 0.0]
    x2 = (1.0 + g1 * x1 * params.tau1 * (1.0 - x1 / params.n1) - params.k1 / x1) / g1
    out.append(CurveSample("BC1_K", keep(x1, x2, x2_lo, x2_hi)))

    # floor border of group 1: F1 = 0 on x1 > 0 (the x2 axis is a separate
    # trivial zero set); the formula extends continuously to x1 = 0
    x1 = _curve_grid(x1_lo, x1_hi, resolution)
    x2 = (1.0 + g1 * x1 * params.tau1 * (1.0 - x1 / params.n1)) / g1
    out.append(CurveSample("BC1_0", keep(x1, x2, x2_lo, x2_hi)))

    # mirrored borders of group 2, solved for x1 as a function of x2
    x2 = _curve_grid(x2_lo, x2_hi, resolution)
    x2k = x2[x2 > 0.0]
    x1 = (1.0 + g2 * x2k * params.tau2 * (1.0 - x2k / params.n2) - params.k2 / x2k) / g2
    pts = np.column_stack([x1, x2k])
    out.append(CurveSample("BC2_K", pts[(x1 >= x1_lo) & (x1 <= x1_hi)]))

    x1 = (1.0 + g2 * x2 * params.tau2 * (1.0 - x2 / params.n2)) / g2
    pts = np.column_stack([x1, x2])
    out.append(CurveSample("BC2_0", pts[(x1 >= x1_lo) & (x1 <= x1_hi)]))
    return out
