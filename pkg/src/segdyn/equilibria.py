"""Fixed points of the capped map: enumeration, real/virtual split, stability.

A candidate fixed point is "real" when the capped step leaves it in place and
"virtual" when the defining formula produces a point whose region-membership
condition fails (the formula still has analytic meaning: the point organizes
nearby bifurcations).  Stability at points on a constraint line is read off
the 1-D restriction derivative, never the 2-D Jacobian of the smooth pair --
the smooth Jacobian does not govern points where a clamp is active.

The origin is repelling along each axis (restriction derivative 1 with the
cubic pushing outward) yet the region mapping to the origin has positive
measure, so arbitrarily close 2-D points land exactly on it; we label it
Repelling and expose eigen data (1, 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .mapcore import RegionId, State, eval_F, region_of, step
from .params import ModelParams
from .restrict import build_restriction, derivative_1d

#: fixed points must be reproduced by the capped step to this tolerance
FIXED_TOL = 1e-10

#: samples of D used for the positive-measure region test at axis points
_MEASURE_SAMPLES = 10_000
_MEASURE_SEED = 7


class Family(Enum):
    """Where a fixed point lives; also the primary sort key for output."""

    ORIGIN = "origin"
    AXIS1 = "axis1"  # (K1, 0)
    AXIS2 = "axis2"  # (0, K2)
    CORNER = "corner"  # (K1, K2)
    LINE_X2K2 = "line_x2k2"  # quadratic family on x2 = K2
    LINE_X1K1 = "line_x1k1"  # quadratic family on x1 = K1
    INTERIOR = "interior"  # intersections of the two reaction curves


class StabilityClass(Enum):
    SUPERSTABLE_2D = "superstable2d"  # both eigenvalues 0
    SUPERSTABLE_LINE = "superstable_line"  # 0 along one direction (flat)
    ATTRACTING = "attracting"
    SADDLE = "saddle"
    REPELLING = "repelling"


@dataclass(frozen=True)
class FixedPointRecord:
    location: State
    family: Family
    real: bool
    region: RegionId
    stability: StabilityClass | None  # None until classified (virtual stays None)
    eigen: tuple[float, float] | None  # flat branches contribute 0.0


def reaction_curves(
    params: ModelParams, resolution: int
) -> tuple[np.ndarray, np.ndarray]:
    """Sampled loci where F1 (resp. F2) fixes its own coordinate.

    Each is a unimodal arc: x2 = tau1 x1 (1 - x1/N1) over x1 in [0, N1], and
    the coordinate swap for the second curve.  Returned as (m, 2) arrays.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    x1 = np.linspace(0.0, params.n1, resolution)
    phi1 = np.column_stack([x1, params.tau1 * x1 * (1.0 - x1 / params.n1)])
    x2 = np.linspace(0.0, params.n2, resolution)
    phi2 = np.column_stack([params.tau2 * x2 * (1.0 - x2 / params.n2), x2])
    return phi1, phi2


def _curve_intersections(params: ModelParams) -> list[tuple[float, float]]:
    """All nonzero intersections of the two reaction curves.

    512^2-cell sign test over [0, N1] x [0, N2] (both residuals must change
    sign across a cell), then damped Newton to 1e-12.  At most four roots
    exist, so brute force is cheap and robust.
    """
    n1, n2, t1, t2 = params.n1, params.n2, params.tau1, params.tau2
    cells = 512
    g1x = np.linspace(0.0, n1, cells + 1)
    g2x = np.linspace(0.0, n2, cells + 1)
    xx, yy = np.meshgrid(g1x, g2x, indexing="ij")
    r1 = yy - t1 * xx * (1.0 - xx / n1)
    r2 = xx - t2 * yy * (1.0 - yy / n2)

    def straddles(a):
        lo = np.minimum.reduce([a[:-1, :-1], a[1:, :-1], a[:-1, 1:], a[1:, 1:]])
        hi = np.maximum.reduce([a[:-1, :-1], a[1:, :-1], a[:-1, 1:], a[1:, 1:]])
        return (lo <= 0.0) & (hi >= 0.0)

    candidates = np.argwhere(straddles(r1) & straddles(r2))

    def newton(x, y):
        for _ in range(60):
            f = np.array([y - t1 * x * (1.0 - x / n1),
                          x - t2 * y * (1.0 - y / n2)])
            if np.max(np.abs(f)) < 1e-13:
                break
            jac = np.array([[-t1 * (1.0 - 2.0 * x / n1), 1.0],
                            [1.0, -t2 * (1.0 - 2.0 * y / n2)]])
            try:
                dx, dy = np.linalg.solve(jac, -f)
            except np.linalg.LinAlgError:
                return None
            lam = 1.0
            base = np.max(np.abs(f))
            while lam > 1e-6:
                xn, yn = x + lam * dx, y + lam * dy
                fn = np.array([yn - t1 * xn * (1.0 - xn / n1),
                               xn - t2 * yn * (1.0 - yn / n2)])
                if np.max(np.abs(fn)) < base:
                    x, y = xn, yn
                    break
                lam *= 0.5
            else:
                return None
        resid = max(abs(y - t1 * x * (1.0 - x / n1)),
                    abs(x - t2 * y * (1.0 - y / n2)))
        if resid > 1e-12:
            return None
        return x, y

    roots: list[tuple[float, float]] = []
    for i, j in candidates:
        seed = (0.5 * (g1x[i] + g1x[i + 1]), 0.5 * (g2x[j] + g2x[j + 1]))
        got = newton(*seed)
        if got is None:
            continue
        x, y = got
        if math.hypot(x, y) < 1e-9:  # the origin is its own family
            continue
        if not (-1e-9 <= x <= n1 + 1e-9 and -1e-9 <= y <= n2 + 1e-9):
            continue
        if all(math.hypot(x - a, y - b) > 1e-9 for a, b in roots):
            roots.append((float(x), float(y)))
    roots.sort()
    return roots


def _line_roots(n: float, tau: float, k_other: float) -> list[float]:
    """Roots of x R(x) = K_other: N/2 -+ sqrt((N/2)^2 - K N/tau)."""
    disc = (n / 2.0) ** 2 - k_other * n / tau
    if disc < 0.0:
        return []
    return [n / 2.0 - math.sqrt(disc), n / 2.0 + math.sqrt(disc)]


def _is_fixed(params: ModelParams, loc: State) -> bool:
    image = step(params, loc)
    return max(abs(image[0] - loc[0]), abs(image[1] - loc[1])) <= FIXED_TOL


def _region_hit_fraction(params: ModelParams, target: RegionId) -> float:
    """Fraction of uniformly sampled D whose image degenerates as `target`."""
    rng = np.random.default_rng(_MEASURE_SEED)
    x1 = rng.uniform(0.0, params.k1, _MEASURE_SAMPLES)
    x2 = rng.uniform(0.0, params.k2, _MEASURE_SAMPLES)
    hits = sum(
        1
        for a, b in zip(x1, x2)
        if region_of(params, (float(a), float(b))) is target
    )
    return hits / _MEASURE_SAMPLES


def jacobian_smooth(params: ModelParams, state: State) -> np.ndarray:
    """Analytic Jacobian of the unconstrained pair (F1, F2).

    Only meaningful where no clamp is active, so the state must classify as
    region R1 (boundary points shared with R1 by the tie-break are accepted).
    """
    if region_of(params, state) is not RegionId.R1:
        raise ValueError(f"state {state} is not in the clamp-free region")
    x1, x2 = state
    g1, g2 = params.gamma1, params.gamma2
    t1, t2 = params.tau1, params.tau2
    return np.array(
        [
            [1.0 - g1 * x2 + g1 * t1 * (2.0 * x1 - 3.0 * x1 * x1 / params.n1),
             -g1 * x1],
            [-g2 * x2,
             1.0 - g2 * x1 + g2 * t2 * (2.0 * x2 - 3.0 * x2 * x2 / params.n2)],
        ]
    ) + 0.0  # clears IEEE -0.0 in the off-diagonal at axis states


def stability_of(
    params: ModelParams, record: FixedPointRecord
) -> tuple[StabilityClass, tuple[float, float]]:
    """Stability class plus eigen data for a real fixed point.

    Axis and corner points sit on flat branches: the eigen data along the
    flattened direction is 0.  An axis point is superstable in the full 2-D
    sense exactly when the doubly-degenerate region adjacent to it meets D in
    positive measure (checked by sampling); otherwise the transverse
    multiplier 1 - gamma K governs.  Points on a constraint line are
    classified through the restriction derivative.
    """
    if not record.real:
        raise ValueError(f"cannot classify virtual record at {record.location}")
    fam = record.family
    if fam is Family.ORIGIN:
        return StabilityClass.REPELLING, (1.0, 1.0)
    if fam is Family.CORNER:
        return StabilityClass.SUPERSTABLE_2D, (0.0, 0.0)
    if fam is Family.AXIS1:
        if _region_hit_fraction(params, RegionId.R6) > 0.0:
            return StabilityClass.SUPERSTABLE_2D, (0.0, 0.0)
        return StabilityClass.SUPERSTABLE_LINE, (0.0, 1.0 - params.gamma2 * params.k1)
    if fam is Family.AXIS2:
        if _region_hit_fraction(params, RegionId.R4) > 0.0:
            return StabilityClass.SUPERSTABLE_2D, (0.0, 0.0)
        return StabilityClass.SUPERSTABLE_LINE, (0.0, 1.0 - params.gamma1 * params.k2)
    if fam in (Family.LINE_X2K2, Family.LINE_X1K1):
        tag = "f1" if fam is Family.LINE_X2K2 else "f2"
        along = record.location[0] if fam is Family.LINE_X2K2 else record.location[1]
        lam = derivative_1d(build_restriction(params, tag), along)[1]
        cls = StabilityClass.ATTRACTING if abs(lam) < 1.0 else StabilityClass.SADDLE
        return cls, (lam, 0.0)
    # interior: spectral data of the smooth Jacobian
    eig = np.linalg.eigvals(jacobian_smooth(params, record.location))
    if np.iscomplexobj(eig) and np.any(np.abs(eig.imag) > 1e-12):
        rho = float(np.abs(eig[0]))
        pair = (rho, rho)
        cls = StabilityClass.ATTRACTING if rho < 1.0 else StabilityClass.REPELLING
        return cls, pair
    vals = sorted(float(v) for v in eig.real)
    mags = [abs(v) for v in vals]
    if max(mags) < 1.0:
        cls = StabilityClass.ATTRACTING
    elif min(mags) > 1.0:
        cls = StabilityClass.REPELLING
    else:
        cls = StabilityClass.SADDLE
    return cls, (vals[0], vals[1])


def enumerate_fixed_points(params: ModelParams) -> list[FixedPointRecord]:
    """Every fixed-point record, real and virtual, sorted by family then x1.

    Always present: origin, (K1, 0), (0, K2).  The corner joins when the raw
    image weakly dominates the caps there (both clamps active, so the capped
    map fixes it).  The two quadratic families on the constraint lines carry
    real/virtual flags from the line-invariance bound; reaction-curve
    intersections carry flags from the clamp-free-region test.
    """
    out: list[FixedPointRecord] = []

    def rec(loc, family, real):
        return FixedPointRecord(
            location=loc,
            family=family,
            real=real,
            region=region_of(params, loc),
            stability=None,
            eigen=None,
        )

    out.append(rec((0.0, 0.0), Family.ORIGIN, True))
    out.append(rec((params.k1, 0.0), Family.AXIS1, True))
    out.append(rec((0.0, params.k2), Family.AXIS2, True))

    corner = (params.k1, params.k2)
    raw = eval_F(params, corner)
    if raw[0] >= params.k1 and raw[1] >= params.k2:
        out.append(rec(corner, Family.CORNER, True))

    for x in _line_roots(params.n1, params.tau1, params.k2):
        loc = (x, params.k2)
        out.append(rec(loc, Family.LINE_X2K2, _is_fixed(params, loc)))
    for y in _line_roots(params.n2, params.tau2, params.k1):
        loc = (params.k1, y)
        out.append(rec(loc, Family.LINE_X1K1, _is_fixed(params, loc)))

    for x, y in _curve_intersections(params):
        loc = (x, y)
        in_d = 0.0 <= x <= params.k1 and 0.0 <= y <= params.k2
        out.append(rec(loc, Family.INTERIOR, in_d and _is_fixed(params, loc)))

    families = list(Family)
    out.sort(key=lambda r: (families.index(r.family), r.location[0], r.location[1]))
    final = []
    for r in out:
        if r.real:
            cls, eig = stability_of(params, r)
            r = replace(r, stability=cls, eigen=eig)
        final.append(r)
    return final
