"""Bifurcation boundaries in the cap plane and cycles of the 1-D restrictions.

Boundaries come in two kinds.  Closed-form loci: a constraint-line fixed
point collides with the cap corner (BCe1/BCe2), or the hump of a restriction
touches its clamp level so the plateau disappears (BCp1/BCp2).  Root-found
locus: a corner 2-cycle is born when the second iterate of the corner returns
to the clamp level (SN2); that condition is polynomial in K1, so we scan for
a sign change and bisect.

Cycle finding on a 1-D restriction iterates a seed grid, detects convergence
to a cycle, and reduces to the minimal period.  A cycle is superstable when
an iterate lands on a flat branch (derivative 0 kills the multiplier).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mapcore import RegionId, eval_F, region_of, step
from .params import ModelParams
from .restrict import (
    KFlat,
    NoReturnError,
    PiecewiseMap1D,
    ReturnMapSpec,
    SECTION_X2,
    ZeroFlat,
    build_restriction,
    derivative_1d,
    eval_1d,
    first_return,
)
from .roots import bisect_root, golden_max

#: two cycle points closer than this are the same point
CYCLE_TOL = 1e-9

_SEED_GRID = 1000
_TRANSIENT_MAP = 2000
_TRANSIENT_RETURN = 200


class NoRootError(RuntimeError):
    """The scanned bracket contains no sign change."""


@dataclass(frozen=True)
class DiagonalThresholds:
    """Cap levels splitting the diagonal restriction into regimes.

    k_fp_bcb: the unconstrained fixed point reaches the clamp level.
    k_bar:    the clamped corner fixed point x* = K loses |slope| <= 1.
    x_c:      argmax of the diagonal cubic.
    k_smooth: clamp level grazing the hump; no plateau above it.
    """

    k_fp_bcb: float
    k_bar: float
    x_c: float
    k_smooth: float


@dataclass(frozen=True)
class BcbCurve:
    curve_id: str  # BCe1 | BCe2 | BCp1 | BCp2 | SN2
    points: np.ndarray  # (m, 2) samples in the (K1, K2) plane
    closed_form: bool


@dataclass(frozen=True)
class CycleRecord:
    period: int
    points: tuple[float, ...]  # consecutive iterates, rotated to start at min
    superstable: bool
    multiplier: float  # product of branch slopes along the cycle
    word: str  # symbolic letters, lexicographic-minimum rotation


def _diag_slope(params: ModelParams, x: float) -> float:
    g, t, n = params.gamma1, params.tau1, params.n1
    return 1.0 + 2.0 * g * (t - 1.0) * x - 3.0 * (g * t / n) * x * x


def _diag_value(params: ModelParams, x: float) -> float:
    g, t, n = params.gamma1, params.tau1, params.n1
    return x * (1.0 + g * (t - 1.0) * x - (g * t / n) * x * x)


def diagonal_thresholds(params: ModelParams) -> DiagonalThresholds:
    """The four regime boundaries for equal caps on symmetric parameters.

    Each closed form is re-verified on the spot by bisection of the defining
    slope condition, so a silently wrong formula cannot escape.
    """
    if not params.symmetric:
        raise ValueError("diagonal thresholds need symmetric gamma/tau/N")
    g, t, n = params.gamma1, params.tau1, params.n1
    if t <= 1.0:
        raise ValueError(f"tau must exceed 1, got {t}")
    k_fp = n * (1.0 - 1.0 / t)
    lead = 3.0 * g * t / n
    k_bar = (g * (t - 1.0) + math.sqrt(g * g * (t - 1.0) ** 2 + 2.0 * lead)) / lead
    x_c = (g * (t - 1.0) + math.sqrt(g * g * (t - 1.0) ** 2 + lead)) / lead

    check = bisect_root(lambda x: _diag_slope(params, x) + 1.0, 0.0, 2.0 * k_bar,
                        xtol=1e-12)
    if abs(check - k_bar) > 1e-10:
        raise RuntimeError(f"slope = -1 level {check} disagrees with {k_bar}")
    vertex = g * (t - 1.0) / lead
    check = bisect_root(lambda x: _diag_slope(params, x), vertex, 2.0 * x_c,
                        xtol=1e-12)
    if abs(check - x_c) > 1e-10:
        raise RuntimeError(f"critical point {check} disagrees with {x_c}")

    return DiagonalThresholds(
        k_fp_bcb=k_fp, k_bar=k_bar, x_c=x_c, k_smooth=_diag_value(params, x_c)
    )


def bce1_k2(params: ModelParams, k1: float) -> float:
    """Cap K2 at which the fixed point on x2 = K2 collides with the corner."""
    return k1 * params.tau1 * (1.0 - k1 / params.n1)


def bce2_k1(params: ModelParams, k2: float) -> float:
    return k2 * params.tau2 * (1.0 - k2 / params.n2)


def bcb_equilibrium_curves(
    params: ModelParams, k_range: tuple[float, float], resolution: int
) -> tuple[BcbCurve, BcbCurve]:
    """Corner-collision loci of the two line fixed-point families.

    Both are parametrized by the cap named in their id and sampled over
    k_range; they intersect at K1 = K2 = N(1 - 1/tau) where the corner itself
    is the colliding fixed point.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    ks = np.linspace(k_range[0], k_range[1], resolution)
    e1 = np.column_stack([ks, [bce1_k2(params, float(k)) for k in ks]])
    e2 = np.column_stack([[bce2_k1(params, float(k)) for k in ks], ks])
    return (
        BcbCurve("BCe1", e1, closed_form=True),
        BcbCurve("BCe2", e2, closed_form=True),
    )


def _hump_cap(a: float, g: float, t: float, n: float) -> float:
    """Clamp level grazing the hump of x(a + g t x (1 - x/n) - g x ... )."""
    radicand = (n / 3.0) ** 2 + n * a / (3.0 * g * t)
    if radicand < 0.0:
        raise ValueError("hump collision undefined: negative root expression")
    xc = n / 3.0 + math.sqrt(radicand)
    b, c = g * t, -g * t / n
    return xc * (a + b * xc + c * xc * xc)


def bcp1_k1(params: ModelParams, k2: float) -> float:
    """K1 at which the restriction to x2 = K2 grazes its clamp level."""
    return _hump_cap(1.0 - params.gamma1 * k2, params.gamma1, params.tau1, params.n1)


def bcp2_k2(params: ModelParams, k1: float) -> float:
    return _hump_cap(1.0 - params.gamma2 * k1, params.gamma2, params.tau2, params.n2)


def _verified_hump(a: float, g: float, t: float, n: float, cap: float) -> None:
    """Cross-check the closed-form hump height by golden section.

    The cubic falls to a local minimum before rising to the hump whenever
    a < 0, so the search bracket starts at that minimum to stay unimodal.
    """

    def h(x):
        return x * (a + g * t * x - (g * t / n) * x * x)

    radicand = (n / 3.0) ** 2 + n * a / (3.0 * g * t)
    lo = max(0.0, n / 3.0 - math.sqrt(radicand))
    _, peak = golden_max(h, lo, n)
    if abs(peak - cap) > 1e-6:
        raise RuntimeError(f"hump height {peak} disagrees with closed form {cap}")


def bcb_smoothness_curves(
    params: ModelParams, k_range: tuple[float, float], resolution: int
) -> tuple[BcbCurve, BcbCurve]:
    """Loci where a constraint-line restriction loses its plateau.

    BCp1 is parametrized by K2 (yielding K1), BCp2 by K1.  Every sample is
    verified against a numeric maximization of the restriction cubic.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    ks = np.linspace(k_range[0], k_range[1], resolution)
    p1 = np.empty((resolution, 2))
    p2 = np.empty((resolution, 2))
    for i, k in enumerate(ks):
        k = float(k)
        k1 = bcp1_k1(params, k)
        _verified_hump(1.0 - params.gamma1 * k, params.gamma1, params.tau1,
                       params.n1, k1)
        p1[i] = (k1, k)
        k2 = bcp2_k2(params, k)
        _verified_hump(1.0 - params.gamma2 * k, params.gamma2, params.tau2,
                       params.n2, k2)
        p2[i] = (k, k2)
    return (
        BcbCurve("BCp1", p1, closed_form=True),
        BcbCurve("BCp2", p2, closed_form=True),
    )


def _corner_second_iterate_residual(params: ModelParams, k1: float, k2: float) -> float:
    u = eval_F(params, (k1, k2))
    return eval_F(params, u)[0] - k1


def bcb_2cycle_saddle_node(params: ModelParams, k2: float) -> float:
    """K1 at which the corner's second iterate returns to the clamp level.

    Scans 2000 K1 values over (0, N1] for the first sign change of the
    residual, then bisects to 1e-8 with a Newton polish.
    """
    ks = np.linspace(params.n1 / 2000.0, params.n1, 2000)
    vals = np.array([_corner_second_iterate_residual(params, float(k), k2) for k in ks])
    sign = np.sign(vals)
    hits = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    exact = np.nonzero(vals == 0.0)[0]
    if exact.size and (not hits.size or exact[0] <= hits[0]):
        return float(ks[exact[0]])
    if not hits.size:
        raise NoRootError(f"no corner 2-cycle collision for K2 = {k2}")
    i = int(hits[0])
    return bisect_root(
        lambda k: _corner_second_iterate_residual(params, k, k2),
        float(ks[i]),
        float(ks[i + 1]),
        xtol=1e-8,
    )


def bcb_sn2_curve(
    params: ModelParams, k2_range: tuple[float, float], resolution: int
) -> BcbCurve:
    """SN2 locus sampled over a K2 range; K2 values with no root are skipped."""
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    pts = []
    for k2 in np.linspace(k2_range[0], k2_range[1], resolution):
        try:
            pts.append((bcb_2cycle_saddle_node(params, float(k2)), float(k2)))
        except NoRootError:
            continue
    return BcbCurve("SN2", np.array(pts).reshape(-1, 2), closed_form=False)


def _letters(map1d: PiecewiseMap1D, points) -> str:
    out = []
    for x in points:
        if any(abs(x - b) <= 1e-12 for b in map1d.borders):
            out.append("B")
            continue
        _, branch = eval_1d(map1d, x)
        if isinstance(branch.kind, (ZeroFlat, KFlat)):
            out.append("F")
        else:
            s = map1d.slope(x)
            out.append("B" if s == 0.0 else ("L" if s > 0.0 else "R"))
    return "".join(out)


def _min_rotation(word: str) -> str:
    return min(word[i:] + word[:i] for i in range(len(word))) if word else word


def symbolic_itinerary(map1d: PiecewiseMap1D, cycle) -> str:
    """One letter per cycle point: L/R rising/falling smooth branch, F flat,
    B exactly on a border; reported from the lexicographic-minimum rotation.
    """
    points = list(cycle.points) if isinstance(cycle, CycleRecord) else list(cycle)
    if not points:
        raise ValueError("cycle has no points")
    for i, x in enumerate(points):
        nxt = points[(i + 1) % len(points)]
        if abs(eval_1d(map1d, x)[0] - nxt) > CYCLE_TOL:
            raise ValueError(f"points do not map cyclically at index {i}")
    return _min_rotation(_letters(map1d, points))


def _minimal_period(window: np.ndarray, p: int) -> int:
    for d in range(1, p):
        if p % d:
            continue
        span = len(window) - d
        if np.max(np.abs(window[:span] - window[d : d + span])) <= CYCLE_TOL:
            return d
    return p


def _rotate_to_min(points: np.ndarray) -> tuple[float, ...]:
    i0 = int(np.argmin(points))
    return tuple(float(points[(i0 + j) % len(points)]) for j in range(len(points)))


def _record_for(map1d: PiecewiseMap1D, points: tuple[float, ...]) -> CycleRecord:
    slopes = []
    superstable = False
    for x in points:
        _, branch = eval_1d(map1d, x)
        if isinstance(branch.kind, (ZeroFlat, KFlat)):
            superstable = True
            slopes.append(0.0)
        else:
            slopes.append(derivative_1d(map1d, x)[1])
    mult = float(np.prod(slopes))
    return CycleRecord(
        period=len(points),
        points=points,
        superstable=superstable,
        multiplier=mult,
        word=_min_rotation(_letters(map1d, points)),
    )


def _cycles_of_map(map1d: PiecewiseMap1D, max_period: int) -> list[CycleRecord]:
    lo, hi = map1d.domain
    x = np.linspace(lo, hi, _SEED_GRID)
    for _ in range(_TRANSIENT_MAP):
        x = np.clip(map1d.raw(x), 0.0, map1d.k) + 0.0
        x[x > hi] = np.nan  # escaped the invariant segment
    window = np.empty((_SEED_GRID, 2 * max_period + 1))
    window[:, 0] = x
    for j in range(1, window.shape[1]):
        x = np.clip(map1d.raw(x), 0.0, map1d.k) + 0.0
        x[x > hi] = np.nan
        window[:, j] = x
    found: list[CycleRecord] = []
    for row in window:
        if np.any(np.isnan(row)):
            continue
        match = np.nonzero(np.abs(row[1 : max_period + 1] - row[0]) <= CYCLE_TOL)[0]
        if not match.size:
            continue
        p = _minimal_period(row, int(match[0]) + 1)
        pts = _rotate_to_min(row[:p])
        if any(
            c.period == p and max(abs(a - b) for a, b in zip(c.points, pts)) <= 10 * CYCLE_TOL
            for c in found
        ):
            continue
        found.append(_record_for(map1d, pts))
    found.sort(key=lambda c: (c.period, c.points))
    return found


def _return_letters(params: ModelParams, spec: ReturnMapSpec, points) -> tuple[str, bool, float]:
    """Letters, superstability, multiplier for a cycle of a first-return map.

    The return coordinate stops responding to perturbations as soon as any
    excursion step clamps the section coordinate, so those cycles are flat
    (letter F, multiplier 0).  Otherwise the slope sign comes from a central
    finite difference.
    """
    if spec.section == SECTION_X2:
        degenerate = (RegionId.R2, RegionId.R3, RegionId.R4,
                      RegionId.R5, RegionId.R6, RegionId.R7)
    else:
        degenerate = (RegionId.R3, RegionId.R4, RegionId.R6,
                      RegionId.R7, RegionId.R8, RegionId.R9)
    letters = []
    superstable = False
    mult = 1.0
    h = 1e-7
    lo, hi = spec.domain
    for x in points:
        state = (x, params.k2) if spec.section == SECTION_X2 else (params.k1, x)
        flat = False
        for _ in range(first_return(params, spec, x)[1] + 1):
            if region_of(params, state) in degenerate:
                flat = True
                break
            state = step(params, state)
        if flat:
            letters.append("F")
            superstable = True
            mult = 0.0
            continue
        a, b = max(lo + 1e-12, x - h), min(hi, x + h)
        slope = (first_return(params, spec, b)[0] - first_return(params, spec, a)[0]) / (b - a)
        letters.append("L" if slope > 0.0 else "R")
        mult *= slope
    return "".join(letters), superstable, mult


def _cycles_of_return_map(
    params: ModelParams, spec: ReturnMapSpec, max_period: int
) -> list[CycleRecord]:
    lo, hi = spec.domain
    seeds = np.linspace(lo + (hi - lo) * 1e-6, hi, _SEED_GRID)
    found: list[CycleRecord] = []
    for seed in seeds:
        x = float(seed)
        try:
            for _ in range(_TRANSIENT_RETURN):
                x = first_return(params, spec, x)[0]
            row = [x]
            for _ in range(2 * max_period):
                row.append(first_return(params, spec, row[-1])[0])
        except (NoReturnError, ValueError):
            continue
        row = np.array(row)
        match = np.nonzero(np.abs(row[1 : max_period + 1] - row[0]) <= CYCLE_TOL)[0]
        if not match.size:
            continue
        p = _minimal_period(row, int(match[0]) + 1)
        pts = _rotate_to_min(row[:p])
        if any(
            c.period == p and max(abs(a - b) for a, b in zip(c.points, pts)) <= 10 * CYCLE_TOL
            for c in found
        ):
            continue
        word, superstable, mult = _return_letters(params, spec, pts)
        found.append(CycleRecord(p, pts, superstable, mult, _min_rotation(word)))
    found.sort(key=lambda c: (c.period, c.points))
    return found


def find_cycles_1d(target, max_period: int, params: ModelParams | None = None) -> list[CycleRecord]:
    """All cycles reachable from a 1000-seed grid, minimal periods, deduped.

    `target` is a built 1-D restriction, or a section spec (then `params` is
    required and the iterated map is the numeric first return).
    """
    if not 1 <= max_period <= 64:
        raise ValueError(f"max_period must be in [1, 64], got {max_period}")
    if isinstance(target, PiecewiseMap1D):
        return _cycles_of_map(target, max_period)
    if isinstance(target, ReturnMapSpec):
        if params is None:
            raise ValueError("params are required with a section spec")
        return _cycles_of_return_map(params, target, max_period)
    raise TypeError(f"unsupported cycle target {type(target).__name__}")
