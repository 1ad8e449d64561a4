"""Attractor detection, parameter sweeps, and basin-of-attraction rasters.

The engine iterates many states at once (cells x initial conditions are
independent), keeps a short ring buffer of recent iterates, and classifies
each state from two running statistics over the detection window: distance
to the three boundary fixed points, and the worst-case displacement at every
lag up to max_period.  A state is periodic with period n only if the lag-n
displacement stays below tolerance over the whole window, so an accidental
near-return of a chaotic orbit cannot fake a cycle.

Grids are split into row chunks; each chunk is a pure function of its inputs,
so results are identical whatever the worker count or completion order.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .mapcore import State, step_arrays
from .params import ModelParams

#: per-IC / per-cell label encoding inside int16 grids
CODE_ORIGIN = 0
CODE_AXIS1 = -1
CODE_AXIS2 = -2
CODE_APERIODIC = -3
CODE_UNRESOLVED = -4

DEFAULT_ICS = ((1.0, 1.0), (0.5, 0.6), (0.6, 0.5), (0.97, 0.31), (0.31, 0.97))

_CHUNK_STATES = 12_000  # iterated states per parallel task; fits cache


def _rows_per_chunk(states_per_row: int) -> int:
    return max(1, _CHUNK_STATES // max(1, states_per_row))


@dataclass(frozen=True)
class ScanConfig:
    """Budgets and seeds for attractor classification."""

    transient: int = 2000
    detect: int = 400
    max_period: int = 30
    cycle_tol: float = 1e-8
    axis_tol: float = 1e-6
    ics: tuple[tuple[float, float], ...] = DEFAULT_ICS

    def __post_init__(self) -> None:
        if self.transient < 0:
            raise ValueError(f"transient must be >= 0, got {self.transient}")
        if self.max_period < 1:
            raise ValueError(f"max_period must be >= 1, got {self.max_period}")
        if self.detect < self.max_period:
            raise ValueError(
                f"detect window ({self.detect}) must cover max_period ({self.max_period})"
            )
        if self.cycle_tol <= 0 or self.axis_tol <= 0:
            raise ValueError("tolerances must be positive")
        if not self.ics:
            raise ValueError("at least one initial condition is required")
        pairs = {(a, b) for a, b in self.ics}
        if pairs != {(b, a) for a, b in pairs}:
            raise ValueError("initial-condition fractions must be swap-closed")


@dataclass(frozen=True)
class AttractorLabel:
    """Where an orbit settles; `period` is meaningful only for cycles."""

    kind: str  # origin | axis1 | axis2 | cycle | aperiodic | unresolved
    period: int = 0

    def __str__(self) -> str:
        return f"cycle({self.period})" if self.kind == "cycle" else self.kind

    @property
    def interior(self) -> bool:
        return self.kind in ("cycle", "aperiodic")


def label_from_code(code: int) -> AttractorLabel:
    if code > 0:
        return AttractorLabel("cycle", int(code))
    return AttractorLabel(
        {
            CODE_ORIGIN: "origin",
            CODE_AXIS1: "axis1",
            CODE_AXIS2: "axis2",
            CODE_APERIODIC: "aperiodic",
            CODE_UNRESOLVED: "unresolved",
        }[int(code)]
    )


@dataclass(frozen=True)
class PeriodGrid:
    """Cap-plane scan; codes[i, j] is the cell at k2_values[i], k1_values[j]."""

    k1_range: tuple[float, float]
    k2_range: tuple[float, float]
    resolution: int
    codes: np.ndarray  # int16, shape (resolution, resolution), k2 ascending

    @property
    def k1_values(self) -> np.ndarray:
        return np.linspace(self.k1_range[0], self.k1_range[1], self.resolution)

    @property
    def k2_values(self) -> np.ndarray:
        return np.linspace(self.k2_range[0], self.k2_range[1], self.resolution)

    def label_at(self, k1_index: int, k2_index: int) -> AttractorLabel:
        return label_from_code(self.codes[k2_index, k1_index])


@dataclass(frozen=True)
class Slice1D:
    """One vertical slice of a 1-D bifurcation diagram."""

    value: float  # the varying cap
    label: AttractorLabel
    samples: np.ndarray  # witness coordinate values (cycle points or window)


@dataclass(frozen=True)
class BasinRaster:
    """Pixel classification of a phase-plane window.

    codes[i, j] is the pixel at x2_values[i], x1_values[j] (x2 ascending);
    positive codes index interior attractors in the legend.
    """

    window: tuple[float, float, float, float]
    resolution: int
    codes: np.ndarray  # int16, shape (resolution, resolution)
    legend: dict[int, np.ndarray] = field(compare=False)

    def label_at(self, x1_index: int, x2_index: int) -> AttractorLabel:
        code = int(self.codes[x2_index, x1_index])
        if code > 0:
            pts = self.legend[code]
            return AttractorLabel("cycle", len(pts)) if len(pts) <= 64 else AttractorLabel("aperiodic")
        return label_from_code(code)


# --------------------------------------------------------------------------
# classification engine


def _classify_states(
    params: ModelParams,
    x1: np.ndarray,
    x2: np.ndarray,
    k1,
    k2,
    config: ScanConfig,
    keep_window: bool = False,
):
    """Transient + windowed detection for a stack of states.

    Returns (codes, ring, head) and, when keep_window is set, the full
    detection-window trace of both coordinates.  ring[(head - j) % depth]
    holds (x1, x2) of the state j steps before the last; cycle points are
    read from it.
    """
    n = x1.shape[0]
    mp = config.max_period
    depth = mp + 1
    for _ in range(config.transient):
        x1, x2 = step_arrays(x1, x2, params, k1, k2)
    ring = np.empty((depth, 2, n))
    ring[0, 0] = x1
    ring[0, 1] = x2
    trace = np.empty((config.detect + 1, n, 2)) if keep_window else None
    if keep_window:
        trace[0, :, 0] = x1
        trace[0, :, 1] = x2
    axis_max = np.zeros((3, n))
    lag_max = np.zeros((mp, n))
    np.maximum(np.abs(x1), np.abs(x2), out=axis_max[0])
    np.maximum(np.abs(x1 - k1), np.abs(x2), out=axis_max[1])
    np.maximum(np.abs(x1), np.abs(x2 - k2), out=axis_max[2])
    # gather order mapping ring rows to lags 1..mp for each write position
    perms = np.empty((depth, mp), dtype=np.intp)
    for pos in range(depth):
        perms[pos] = [(pos - lag) % depth for lag in range(1, mp + 1)]
    diff = np.empty((depth, 2, n))
    dall = np.empty((depth, n))
    ordered = np.empty((mp, n))
    for t in range(1, config.detect + 1):
        x1, x2 = step_arrays(x1, x2, params, k1, k2)
        np.maximum(axis_max[0], np.maximum(np.abs(x1), np.abs(x2)), out=axis_max[0])
        np.maximum(axis_max[1], np.maximum(np.abs(x1 - k1), np.abs(x2)), out=axis_max[1])
        np.maximum(axis_max[2], np.maximum(np.abs(x1), np.abs(x2 - k2)), out=axis_max[2])
        np.subtract(ring[:, 0], x1, out=diff[:, 0])
        np.subtract(ring[:, 1], x2, out=diff[:, 1])
        np.abs(diff, out=diff)
        np.maximum(diff[:, 0], diff[:, 1], out=dall)
        pos = t % depth
        np.take(dall, perms[pos], axis=0, out=ordered)
        span = min(t, mp)  # rows beyond span still hold the t=0 state
        np.maximum(lag_max[:span], ordered[:span], out=lag_max[:span])
        ring[pos, 0] = x1
        ring[pos, 1] = x2
        if keep_window:
            trace[t, :, 0] = x1
            trace[t, :, 1] = x2
    codes = np.full(n, CODE_APERIODIC, dtype=np.int16)
    periodic = lag_max <= config.cycle_tol
    has_period = periodic.any(axis=0)
    codes[has_period] = np.argmax(periodic, axis=0)[has_period] + 1
    codes[axis_max[2] <= config.axis_tol] = CODE_AXIS2
    codes[axis_max[1] <= config.axis_tol] = CODE_AXIS1
    codes[axis_max[0] <= config.axis_tol] = CODE_ORIGIN
    head = config.detect % depth
    return (codes, ring, head, trace) if keep_window else (codes, ring, head)


def _cycle_points(ring: np.ndarray, head: int, index: int, period: int) -> np.ndarray:
    depth = ring.shape[0]
    rows = [(head - j) % depth for j in range(period - 1, -1, -1)]
    pts = ring[rows, :, index]
    start = int(np.argmin(pts[:, 0] + 1e-12 * pts[:, 1]))
    return np.vstack([pts[(start + j) % period] for j in range(period)])


def _ic_states(params: ModelParams, k1: float, k2: float, config: ScanConfig):
    x1 = np.array([f1 * k1 for f1, _ in config.ics])
    x2 = np.array([f2 * k2 for _, f2 in config.ics])
    return x1, x2


def _aggregate(codes: np.ndarray, k1: float, k2: float) -> tuple[int, int]:
    """Cell label from per-IC codes: smallest interior period wins, then
    aperiodic.  Boundary-only cells take the majority axis over the seeds
    (a swap-equivariant statistic, unlike any single off-diagonal seed);
    ties go to the larger cap's axis, and Origin only when no seed reached
    an axis at all.  Returns (code, witness IC index)."""
    periods = np.where(codes > 0, codes, np.int16(32767))
    best = int(periods.min())
    if best < 32767:
        ic = int(np.argmin(periods))
        return best, ic
    if (codes == CODE_APERIODIC).any():
        ic = int(np.argmax(codes == CODE_APERIODIC))
        return CODE_APERIODIC, ic
    n1 = int((codes == CODE_AXIS1).sum())
    n2 = int((codes == CODE_AXIS2).sum())
    if n1 == n2 == 0:
        return CODE_ORIGIN, len(codes) - 1
    if n1 > n2 or (n1 == n2 and k1 >= k2):
        code = CODE_AXIS1
    else:
        code = CODE_AXIS2
    ic = int(np.nonzero(codes == code)[0][-1])
    return code, ic


def attractor_scan(
    params: ModelParams, config: ScanConfig = ScanConfig()
) -> tuple[AttractorLabel, np.ndarray]:
    """Classify the attractor reached from the configured seeds.

    Returns the label plus witness points: the cycle orbit for a periodic
    attractor, a tail sample for an aperiodic one, the point itself for the
    boundary fixed points.
    """
    x1, x2 = _ic_states(params, params.k1, params.k2, config)
    codes, ring, head = _classify_states(params, x1, x2, params.k1, params.k2, config)
    code, ic = _aggregate(codes, params.k1, params.k2)
    if code > 0:
        return label_from_code(code), _cycle_points(ring, head, ic, code)
    if code == CODE_APERIODIC:
        depth = ring.shape[0]
        rows = [(head - j) % depth for j in range(depth - 1, -1, -1)]
        return label_from_code(code), ring[rows, ic, :]
    witness = {
        CODE_ORIGIN: (0.0, 0.0),
        CODE_AXIS1: (params.k1, 0.0),
        CODE_AXIS2: (0.0, params.k2),
    }[code]
    return label_from_code(code), np.array([witness])


# --------------------------------------------------------------------------
# parameter sweeps


def _sweep2d_chunk(args) -> tuple[int, np.ndarray]:
    params, k1s, k2s, config, row_lo, row_hi = args
    rows = k2s[row_lo:row_hi]
    k1g, k2g = np.meshgrid(k1s, rows)  # (r, res)
    k1f, k2f = k1g.ravel(), k2g.ravel()
    cells = k1f.shape[0]
    n_ic = len(config.ics)
    fr = np.array(config.ics)  # (n_ic, 2)
    x1 = (fr[:, 0:1] * k1f[None, :]).ravel()
    x2 = (fr[:, 1:2] * k2f[None, :]).ravel()
    k1t = np.tile(k1f, n_ic)
    k2t = np.tile(k2f, n_ic)
    codes, _, _ = _classify_states(params, x1, x2, k1t, k2t, config)
    per_ic = codes.reshape(n_ic, cells)
    out = np.empty(cells, dtype=np.int16)
    periods = np.where(per_ic > 0, per_ic, np.int16(32767))
    best = periods.min(axis=0)
    out[:] = best
    no_cycle = best == 32767
    aper = (per_ic == CODE_APERIODIC).any(axis=0)
    out[no_cycle & aper] = CODE_APERIODIC
    rest = no_cycle & ~aper
    n1 = (per_ic == CODE_AXIS1).sum(axis=0)
    n2 = (per_ic == CODE_AXIS2).sum(axis=0)
    axis1 = (n1 > n2) | ((n1 == n2) & (k1f >= k2f))
    out[rest & (n1 + n2 == 0)] = CODE_ORIGIN
    out[rest & (n1 + n2 > 0) & axis1] = CODE_AXIS1
    out[rest & (n1 + n2 > 0) & ~axis1] = CODE_AXIS2
    return row_lo, out.reshape(len(rows), len(k1s))


def _run_chunks(worker, jobs, workers: int):
    if workers <= 1:
        return [worker(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, jobs))


def sweep2d(
    params: ModelParams,
    k1_range: tuple[float, float],
    k2_range: tuple[float, float],
    resolution: int,
    config: ScanConfig = ScanConfig(),
    workers: int = 1,
) -> PeriodGrid:
    """Attractor label per cell of a caps-plane grid.

    `params` supplies gamma/tau/N; the caps vary per cell.  Chunks of rows
    are classified independently and reassembled by index, so the result is
    byte-identical for any worker count.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    k1s = np.linspace(k1_range[0], k1_range[1], resolution)
    k2s = np.linspace(k2_range[0], k2_range[1], resolution)
    chunk = _rows_per_chunk(resolution * len(config.ics))
    jobs = [
        (params, k1s, k2s, config, lo, min(lo + chunk, resolution))
        for lo in range(0, resolution, chunk)
    ]
    codes = np.empty((resolution, resolution), dtype=np.int16)
    for row_lo, block in _run_chunks(_sweep2d_chunk, jobs, workers):
        codes[row_lo : row_lo + block.shape[0]] = block
    return PeriodGrid(k1_range, k2_range, resolution, codes)


def _sweep1d_chunk(args):
    params, axis, fixed, values, config, lo, hi = args
    vals = values[lo:hi]
    cells = len(vals)
    n_ic = len(config.ics)
    if axis == "k1":
        k1f, k2f = vals, np.full(cells, fixed)
    else:
        k1f, k2f = np.full(cells, fixed), vals
    fr = np.array(config.ics)
    x1 = (fr[:, 0:1] * k1f[None, :]).ravel()
    x2 = (fr[:, 1:2] * k2f[None, :]).ravel()
    k1t, k2t = np.tile(k1f, n_ic), np.tile(k2f, n_ic)
    codes, ring, head, trace = _classify_states(
        params, x1, x2, k1t, k2t, config, keep_window=True
    )
    per_ic = codes.reshape(n_ic, cells)
    # attractors on these paths live on the varying cap's line, so the
    # informative coordinate is the other population's
    coord = 1 if axis == "k1" else 0
    out = []
    for c in range(cells):
        code, ic = _aggregate(per_ic[:, c], float(k1f[c]), float(k2f[c]))
        state = ic * cells + c
        if code > 0:
            pts = _cycle_points(ring, head, state, code)[:, coord]
        else:
            pts = np.unique(trace[:, state, coord].round(12))
        out.append((float(vals[c]), int(code), pts))
    return lo, out


def sweep1d(
    params: ModelParams,
    vary: str,
    fixed_value: float,
    vary_range: tuple[float, float],
    resolution: int,
    config: ScanConfig = ScanConfig(),
    workers: int = 1,
) -> list[Slice1D]:
    """Bifurcation diagram along one cap: `vary` is "k1" or "k2", the other
    cap stays at fixed_value.  Samples hold the witness coordinate (x2 when
    k1 varies, else x1): the cycle points for a periodic slice, the deduped
    detection window otherwise.
    """
    if vary not in ("k1", "k2"):
        raise ValueError(f"vary must be 'k1' or 'k2', got {vary!r}")
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    values = np.linspace(vary_range[0], vary_range[1], resolution)
    chunk = _rows_per_chunk(len(config.ics))
    jobs = [
        (params, vary, fixed_value, values, config, lo, min(lo + chunk, resolution))
        for lo in range(0, resolution, chunk)
    ]
    slices: list[Slice1D] = []
    for lo, rows in sorted(_run_chunks(_sweep1d_chunk, jobs, workers)):
        for value, code, pts in rows:
            slices.append(Slice1D(value, label_from_code(code), pts))
    return slices


# --------------------------------------------------------------------------
# basins


def _attractor_registry(params: ModelParams, config: ScanConfig):
    """Interior attractors reachable from the seed set, deduplicated.

    Returns a list of witness-point arrays; index i corresponds to basin
    code i + 1.
    """
    x1, x2 = _ic_states(params, params.k1, params.k2, config)
    codes, ring, head, trace = _classify_states(
        params, x1, x2, params.k1, params.k2, config, keep_window=True
    )
    registry: list[np.ndarray] = []
    for i, code in enumerate(codes):
        if code > 0:
            pts = _cycle_points(ring, head, i, int(code))
        elif code == CODE_APERIODIC:
            pts = trace[:, i, :]
        else:
            continue
        if any(
            np.min(np.max(np.abs(r[None, :, :] - pts[:, None, :]), axis=2)) <= 1e-4
            for r in registry
        ):
            continue
        registry.append(pts)
    return registry


def _basin_chunk(args):
    params, xs, ys, config, registry, row_lo, row_hi = args
    rows = ys[row_lo:row_hi]
    x1g, x2g = np.meshgrid(xs, rows)
    x1, x2 = x1g.ravel().copy(), x2g.ravel().copy()
    n = x1.shape[0]
    codes = np.full(n, CODE_UNRESOLVED, dtype=np.int16)
    alive = np.arange(n)
    match_tol = 1e-4
    aperiodic_codes = [
        i + 1 for i, pts in enumerate(registry) if len(pts) > config.max_period
    ]
    sole_aperiodic = (
        aperiodic_codes[0]
        if len(aperiodic_codes) == 1 and len(registry) == 1
        else None
    )

    def settle_exact():
        # clamping lands orbits exactly on the boundary sets
        nonlocal alive, x1, x2
        on1 = x2 == 0.0
        on2 = x1 == 0.0
        codes[alive[on1 & on2]] = CODE_ORIGIN
        codes[alive[on1 & ~on2]] = CODE_AXIS1
        codes[alive[on2 & ~on1]] = CODE_AXIS2
        keep = ~(on1 | on2)
        alive, x1, x2 = alive[keep], x1[keep], x2[keep]

    block = 32
    for start in range(0, config.transient, block):
        if alive.size == 0:
            break
        for _ in range(min(block, config.transient - start)):
            x1, x2 = step_arrays(x1, x2, params, params.k1, params.k2)
        settle_exact()

    for _ in range(0, config.detect, 8):
        if alive.size == 0:
            break
        for _ in range(8):
            x1, x2 = step_arrays(x1, x2, params, params.k1, params.k2)
        settle_exact()
        if alive.size == 0:
            break
        near1 = np.maximum(np.abs(x1 - params.k1), np.abs(x2)) <= config.axis_tol
        near2 = np.maximum(np.abs(x1), np.abs(x2 - params.k2)) <= config.axis_tol
        near0 = np.maximum(np.abs(x1), np.abs(x2)) <= config.axis_tol
        codes[alive[near0]] = CODE_ORIGIN
        codes[alive[near1 & ~near0]] = CODE_AXIS1
        codes[alive[near2 & ~near0 & ~near1]] = CODE_AXIS2
        taken = near0 | near1 | near2
        for idx, pts in enumerate(registry):
            if taken.all():
                break
            free = ~taken
            d = np.min(
                np.maximum(
                    np.abs(x1[free, None] - pts[None, :, 0]),
                    np.abs(x2[free, None] - pts[None, :, 1]),
                ),
                axis=1,
            )
            hit = np.zeros_like(taken)
            hit[free] = d <= match_tol
            codes[alive[hit]] = idx + 1
            taken |= hit
        keep = ~taken
        alive, x1, x2 = alive[keep], x1[keep], x2[keep]

    if sole_aperiodic is not None and alive.size:
        # nothing else is left for an interior orbit to approach
        interior = (x1 > config.axis_tol) & (x2 > config.axis_tol)
        codes[alive[interior]] = sole_aperiodic
    return row_lo, codes.reshape(len(rows), len(xs))


def basins(
    params: ModelParams,
    window: tuple[float, float, float, float],
    resolution: int,
    config: ScanConfig = ScanConfig(),
    workers: int = 1,
) -> BasinRaster:
    """Basin label per pixel of a phase-plane window.

    Interior attractors are identified first from the seed set; each pixel
    orbit is then matched against them (1e-4 radius) or against the boundary
    fixed points.  Unmatched pixels stay Unresolved rather than guessed --
    except that when the only known attractor is aperiodic, surviving
    interior orbits are assigned to it.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    registry = _attractor_registry(params, config)
    xs = np.linspace(window[0], window[1], resolution)
    ys = np.linspace(window[2], window[3], resolution)
    chunk = _rows_per_chunk(resolution) * 4  # pixels are cheap: most exit early
    jobs = [
        (params, xs, ys, config, registry, lo, min(lo + chunk, resolution))
        for lo in range(0, resolution, chunk)
    ]
    codes = np.empty((resolution, resolution), dtype=np.int16)
    for row_lo, block in _run_chunks(_basin_chunk, jobs, workers):
        codes[row_lo : row_lo + block.shape[0]] = block
    legend = {
        CODE_ORIGIN: np.array([[0.0, 0.0]]),
        CODE_AXIS1: np.array([[params.k1, 0.0]]),
        CODE_AXIS2: np.array([[0.0, params.k2]]),
    }
    for i, pts in enumerate(registry):
        legend[i + 1] = pts
    return BasinRaster(window, resolution, codes, legend)
