"""One-dimensional restrictions of the capped map and first-return maps.

Five restrictions carry the whole interior analysis: the two axis maps (t1,
t2), the maps on the cap lines x2=K2 / x1=K1 (f1, f2), and the diagonal map
(tag "diag") for fully symmetric parameters.  Every restriction is a cubic
x (a + b x + c x^2) clamped to [0, K], which splits its domain into at most
four branches: an optional flat-0 head (cap coupling makes a < 0), a rising
smooth piece, an optional flat-K plateau, and a falling smooth piece.

The smooth branch is evaluated with exactly the factored expression that
`mapcore.eval_F` uses, so iterating a restriction reproduces the matching
coordinate of a 2-D orbit bit for bit while the orbit stays on the line.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mapcore import State, step
from .params import ModelParams

TAGS = ("t1", "t2", "f1", "f2", "diag")

SECTION_X2 = "x2=k2"
SECTION_X1 = "x1=k1"

#: a clamped step lands exactly on the line; the tolerance guards rounding
SECTION_TOL = 1e-12

RETURN_BUDGET = 100_000


class NoReturnError(RuntimeError):
    """Orbit left the section's basin (or exhausted the step budget)."""


@dataclass(frozen=True)
class ZeroFlat:
    value: float = 0.0


@dataclass(frozen=True)
class KFlat:
    value: float


@dataclass(frozen=True)
class SmoothCubic:
    a: float
    b: float
    c: float


BranchKind = ZeroFlat | KFlat | SmoothCubic


@dataclass(frozen=True)
class Branch:
    lo: float
    hi: float
    kind: BranchKind
    index: int


@dataclass(frozen=True)
class LineInvariantBounds:
    """Upper ends of the forward-invariant segments on the two cap lines."""

    x1m: float  # on x2=K2: invariant for 0 <= x1 <= x1m
    x2m: float  # on x1=K1: invariant for 0 <= x2 <= x2m


@dataclass(frozen=True)
class ReturnMapSpec:
    section: str
    domain: tuple[float, float]
    k: int = 1

    def __post_init__(self) -> None:
        if self.section not in (SECTION_X2, SECTION_X1):
            raise ValueError(f"unknown section {self.section!r}")
        if self.k < 1:
            raise ValueError(f"return count must be >= 1, got {self.k}")


@dataclass(frozen=True)
class PiecewiseMap1D:
    tag: str
    k: float                      # clamp level
    domain: tuple[float, float]
    branches: tuple[Branch, ...]
    borders: tuple[float, ...]    # interior branch boundaries
    # evaluation data: raw(x) = x * ((a - gx*x) + gt*x*(1 - x/n))
    a: float
    gx: float
    gt: float
    n: float

    @property
    def coeffs(self) -> tuple[float, float, float]:
        """Expanded cubic coefficients of raw(x) = x(a + b x + c x^2)."""
        return (self.a, self.gt - self.gx, -self.gt / self.n)

    def raw(self, x):
        """Unclamped branch value; mirrors eval_F term by term."""
        return x * (self.a - self.gx * x + self.gt * x * (1.0 - x / self.n))

    def slope(self, x):
        a, b, c = self.coeffs
        return a + 2.0 * b * x + 3.0 * c * x * x


def line_invariant_bounds(params: ModelParams) -> LineInvariantBounds:
    return LineInvariantBounds(
        x1m=params.k2 * params.tau2 * (1.0 - params.k2 / params.n2),
        x2m=params.k1 * params.tau1 * (1.0 - params.k1 / params.n1),
    )


def _polish_root(f, df, x: float, iterations: int = 3) -> float:
    for _ in range(iterations):
        d = df(x)
        if d == 0.0:
            break
        x = x - f(x) / d
    return x


def _positive_roots(coeffs: list[float], hi: float) -> list[float]:
    """Real roots of the polynomial in (0, hi], highest degree first."""
    rts = np.roots(coeffs)
    out = []
    for r in rts:
        if abs(r.imag) < 1e-9 and 1e-12 < r.real <= hi + 1e-12:
            out.append(float(r.real))
    return out


def build_restriction(params: ModelParams, tag: str) -> PiecewiseMap1D:
    """Branch layout of one restriction; borders solve raw = 0 or K to 1e-9."""
    if tag not in TAGS:
        raise ValueError(f"tag must be one of {TAGS}, got {tag!r}")
    p = params
    if tag == "t1":
        a, gx, gt, n, k = 1.0, 0.0, p.gamma1 * p.tau1, p.n1, p.k1
        hi = p.n1
    elif tag == "t2":
        a, gx, gt, n, k = 1.0, 0.0, p.gamma2 * p.tau2, p.n2, p.k2
        hi = p.n2
    elif tag == "f1":
        bounds = line_invariant_bounds(p)
        a, gx, gt, n, k = 1.0 - p.gamma1 * p.k2, 0.0, p.gamma1 * p.tau1, p.n1, p.k1
        hi = bounds.x1m
    elif tag == "f2":
        bounds = line_invariant_bounds(p)
        a, gx, gt, n, k = 1.0 - p.gamma2 * p.k1, 0.0, p.gamma2 * p.tau2, p.n2, p.k2
        hi = bounds.x2m
    else:  # diag
        if not p.fully_symmetric:
            raise ValueError("diagonal restriction requires fully symmetric parameters")
        a, gx, gt, n, k = 1.0, p.gamma1, p.gamma1 * p.tau1, p.n1, p.k1
        hi = p.n1

    b, c = gt - gx, -gt / n

    def raw(x):
        return x * (a - gx * x + gt * x * (1.0 - x / n))

    def slope(x):
        return a + 2.0 * b * x + 3.0 * c * x * x

    # breakpoints: zero crossings of the quadratic factor and raw = k crossings
    breaks = set()
    for r in _positive_roots([c, b, a], hi):
        breaks.add(_polish_root(lambda x: a + b * x + c * x * x,
                                lambda x: b + 2.0 * c * x, r))
    for r in _positive_roots([c, b, a, -k], hi):
        breaks.add(_polish_root(lambda x: raw(x) - k, slope, r))

    pts = [0.0] + sorted(x for x in breaks if 1e-12 < x < hi - 1e-12) + [hi]
    branches: list[Branch] = []
    for i in range(len(pts) - 1):
        lo_x, hi_x = pts[i], pts[i + 1]
        mid = 0.5 * (lo_x + hi_x)
        v = raw(mid)
        if v < 0.0:
            kind: BranchKind = ZeroFlat()
        elif v > k:
            kind = KFlat(k)
        else:
            kind = SmoothCubic(a, b, c)
        branches.append(Branch(lo_x, hi_x, kind, len(branches)))

    # merge adjacent same-kind intervals (a break can be spurious, e.g. a
    # tangency of raw with K)
    merged: list[Branch] = []
    for br in branches:
        if merged and type(merged[-1].kind) is type(br.kind):
            prev = merged.pop()
            merged.append(Branch(prev.lo, br.hi, prev.kind, prev.index))
        else:
            merged.append(Branch(br.lo, br.hi, br.kind, len(merged)))

    borders = tuple(br.lo for br in merged[1:])
    return PiecewiseMap1D(
        tag=tag, k=k, domain=(0.0, hi), branches=tuple(merged),
        borders=borders, a=a, gx=gx, gt=gt, n=n,
    )


def eval_1d(map1d: PiecewiseMap1D, x: float) -> tuple[float, Branch]:
    """Clamped value and the active branch (lowest index on shared borders)."""
    lo, hi = map1d.domain
    if not lo <= x <= hi:
        raise ValueError(f"x={x!r} outside domain [{lo}, {hi}] of {map1d.tag}")
    value = min(max(map1d.raw(x), 0.0), map1d.k) + 0.0
    for br in map1d.branches:
        if br.lo <= x <= br.hi:
            return value, br
    return value, map1d.branches[-1]


def derivative_1d(map1d: PiecewiseMap1D, x: float) -> tuple[float, float]:
    """One-sided slopes (left, right).

    Wherever the clamp is inactive at x itself the cubic slope applies (the
    stability analysis of border fixed points uses exactly this value);
    strictly inside a flat branch both sides are 0.
    """
    lo, hi = map1d.domain
    if not lo <= x <= hi:
        raise ValueError(f"x={x!r} outside domain [{lo}, {hi}] of {map1d.tag}")
    v = map1d.raw(x)
    if v < 0.0 or v > map1d.k:
        return (0.0, 0.0)
    d = map1d.slope(x)
    return (d, d)


def flat_branch_interval(map1d: PiecewiseMap1D) -> tuple[float, float] | None:
    """Maximal interval where the value sticks at K; None if the map is smooth."""
    for br in map1d.branches:
        if isinstance(br.kind, KFlat):
            return (br.lo, br.hi)
    return None


def g_return_spec(params: ModelParams, k: int = 1) -> ReturnMapSpec:
    """Section spec of the first-return map on the cap line x2=K2."""
    bounds = line_invariant_bounds(params)
    return ReturnMapSpec(section=SECTION_X2, domain=(bounds.x1m, params.k1), k=k)


def return_map_G(params: ModelParams, x1: float) -> float:
    """Closed-form composition giving the first return to x2=K2.

    Defined for x1m < x1 <= K1, where the image leaves the line for exactly
    one step and the following step caps x2 back to K2.
    """
    bounds = line_invariant_bounds(params)
    if not bounds.x1m < x1 <= params.k1:
        raise ValueError(
            f"return map defined on ({bounds.x1m}, {params.k1}], got x1={x1!r}"
        )
    p = params
    i1 = x1 * (1.0 - p.gamma1 * p.k2
               + p.gamma1 * p.tau1 * x1 * (1.0 - x1 / p.n1))
    i2 = p.k2 * (1.0 - p.gamma2 * x1
                 + p.gamma2 * p.tau2 * p.k2 * (1.0 - p.k2 / p.n2))
    return i1 * (1.0 - p.gamma1 * i2
                 + p.gamma1 * p.tau1 * i1 * (1.0 - i1 / p.n1))


def first_return(
    params: ModelParams, spec: ReturnMapSpec, x: float,
    budget: int = RETURN_BUDGET,
) -> tuple[float, int]:
    """k-th intersection of the orbit of a section point with the section.

    Returns (section coordinate, number of off-section iterates before the
    k-th return).  Raises NoReturnError when the orbit converges to an axis
    fixed point or exhausts the budget first.
    """
    lo, hi = spec.domain
    if not lo <= x <= hi:
        # half-open section domains exclude their lower end (the G regime)
        if not lo < x <= hi:
            raise ValueError(f"x={x!r} outside section domain ({lo}, {hi}]")
    if spec.section == SECTION_X2:
        state: State = (x, params.k2)
    else:
        state = (params.k1, x)
    fixed = ((0.0, 0.0), (params.k1, 0.0), (0.0, params.k2))
    hits = 0
    for n in range(1, budget + 1):
        state = step(params, state)
        if spec.section == SECTION_X2:
            on_line = abs(state[1] - params.k2) <= SECTION_TOL
            coord = state[0]
        else:
            on_line = abs(state[0] - params.k1) <= SECTION_TOL
            coord = state[1]
        if on_line and lo < coord <= hi:
            hits += 1
            if hits == spec.k:
                return coord, n - hits
        for fx, fy in fixed:
            if abs(state[0] - fx) <= 1e-9 and abs(state[1] - fy) <= 1e-9:
                if not (on_line and lo < coord <= hi):
                    raise NoReturnError(
                        f"orbit converged to the fixed point ({fx}, {fy}) "
                        f"after {n} steps with {hits} returns"
                    )
    raise NoReturnError(f"no {spec.k}-th return within {budget} steps")
