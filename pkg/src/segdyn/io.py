"""Config parsing, delimited tables, and byte-exact raster output.

Numbers render with 17 significant digits so a written table round-trips
64-bit floats losslessly; rasters are binary PPM (P6) because the format has
no compressor or metadata to perturb byte equality across runs.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .params import CANONICAL_GAMMA, CANONICAL_N, CANONICAL_TAU, ModelParams
from .sweep import (
    CODE_AXIS1,
    CODE_AXIS2,
    CODE_ORIGIN,
    CODE_UNRESOLVED,
    DEFAULT_ICS,
    BasinRaster,
    PeriodGrid,
    ScanConfig,
)


class ConfigError(ValueError):
    """Raised for malformed or invalid configuration text."""


_PARAM_KEYS = ("gamma1", "gamma2", "tau1", "tau2", "n1", "n2", "k1", "k2")
_INT_KEYS = ("transient", "detect", "max_period", "resolution")
KNOWN_KEYS = frozenset(_PARAM_KEYS) | frozenset(_INT_KEYS) | {"ics", "window"}


@dataclass(frozen=True)
class RunConfig:
    """Validated file/flag settings; scan budgets mirror ScanConfig."""

    params: ModelParams
    transient: int = 2000
    detect: int = 400
    max_period: int = 30
    ics: tuple[tuple[float, float], ...] = DEFAULT_ICS
    window: tuple[float, float, float, float] | None = None
    resolution: int | None = None

    def scan_config(self) -> ScanConfig:
        return ScanConfig(
            transient=self.transient,
            detect=self.detect,
            max_period=self.max_period,
            ics=self.ics,
        )


def _default_params(values: dict[str, float]) -> ModelParams:
    return ModelParams(
        gamma1=values.get("gamma1", CANONICAL_GAMMA),
        gamma2=values.get("gamma2", CANONICAL_GAMMA),
        tau1=values.get("tau1", CANONICAL_TAU),
        tau2=values.get("tau2", CANONICAL_TAU),
        n1=values.get("n1", CANONICAL_N),
        n2=values.get("n2", CANONICAL_N),
        k1=values.get("k1", 1.0),
        k2=values.get("k2", 1.0),
    )


def _parse_ics(raw: str, line_no: int) -> tuple[tuple[float, float], ...]:
    pairs = []
    for chunk in raw.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(":")
        if len(parts) != 2:
            raise ConfigError(
                f"line {line_no}: ics entries are 'a:b' fraction pairs, got {chunk!r}"
            )
        try:
            pairs.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise ConfigError(f"line {line_no}: bad ics number in {chunk!r}") from None
    if not pairs:
        raise ConfigError(f"line {line_no}: ics needs at least one 'a:b' pair")
    return tuple(pairs)


def _parse_window(raw: str, line_no: int) -> tuple[float, float, float, float]:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 4:
        raise ConfigError(
            f"line {line_no}: window needs 'x1lo,x1hi,x2lo,x2hi', got {raw!r}"
        )
    try:
        lo1, hi1, lo2, hi2 = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"line {line_no}: bad window number in {raw!r}") from None
    if not (lo1 < hi1 and lo2 < hi2):
        raise ConfigError(f"line {line_no}: window bounds must increase, got {raw!r}")
    return (lo1, hi1, lo2, hi2)


def parse_config(text: str) -> RunConfig:
    """Parse `key = value` lines; `#` starts a comment; unknown keys and
    malformed lines are rejected with their line number.  Missing keys fall
    back to the canonical parameter set with K1 = K2 = 1.0.
    """
    params_raw: dict[str, float] = {}
    ints: dict[str, int] = {}
    ics = DEFAULT_ICS
    window = None
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {raw_line.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        if not value:
            raise ConfigError(f"line {line_no}: empty value for {key!r}")
        if key in _PARAM_KEYS:
            try:
                params_raw[key] = float(value)
            except ValueError:
                raise ConfigError(f"line {line_no}: {key} expects a number, got {value!r}") from None
        elif key in _INT_KEYS:
            try:
                ints[key] = int(value)
            except ValueError:
                raise ConfigError(f"line {line_no}: {key} expects an integer, got {value!r}") from None
        elif key == "ics":
            ics = _parse_ics(value, line_no)
        elif key == "window":
            window = _parse_window(value, line_no)
    params = _default_params(params_raw)  # ModelParams cites any violated rule
    resolution = ints.get("resolution")
    if resolution is not None and resolution < 2:
        raise ConfigError(f"resolution must be >= 2, got {resolution}")
    run = RunConfig(
        params=params,
        transient=ints.get("transient", 2000),
        detect=ints.get("detect", 400),
        max_period=ints.get("max_period", 30),
        ics=ics,
        window=window,
        resolution=resolution,
    )
    run.scan_config()  # validate budgets and swap closure now, not at use time
    return run


def emit_config(run: RunConfig) -> str:
    """Settings as parseable text; parse(emit(run)) is equivalent to run."""
    p = run.params
    lines = [f"{key} = {fmt17(getattr(p, key))}" for key in _PARAM_KEYS]
    lines.append(f"transient = {run.transient}")
    lines.append(f"detect = {run.detect}")
    lines.append(f"max_period = {run.max_period}")
    lines.append("ics = " + ", ".join(f"{fmt17(a)}:{fmt17(b)}" for a, b in run.ics))
    if run.window is not None:
        lines.append("window = " + ",".join(fmt17(v) for v in run.window))
    if run.resolution is not None:
        lines.append(f"resolution = {run.resolution}")
    return "\n".join(lines) + "\n"


def fmt17(value) -> str:
    """17-significant-digit decimal rendering; lossless for 64-bit floats."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def emit_csv(path, header, rows) -> None:
    """Comma-separated table with a header row and LF endings.

    Floats render via fmt17, everything else via str(); byte-deterministic
    for equal inputs.
    """
    out = [",".join(str(h) for h in header)]
    for row in rows:
        out.append(
            ",".join(
                fmt17(v) if isinstance(v, (float, np.floating)) else str(v)
                for v in row
            )
        )
    data = ("\n".join(out) + "\n").encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(data)


# --------------------------------------------------------------------------
# rasters

COLOR_AXIS1 = (0, 160, 0)  # basin of (K1, 0)
COLOR_AXIS2 = (120, 200, 255)  # basin of (0, K2)
COLOR_ORIGIN = (128, 128, 128)
COLOR_UNRESOLVED = (0, 0, 0)
COLOR_APERIODIC = (255, 255, 255)  # also periods above the palette

#: interior basins beyond the first cycle through these
INTERIOR_COLORS = ((200, 0, 0), (0, 0, 220), (255, 140, 0), (150, 0, 160))

#: period n colors PERIOD_PALETTE[n-1]; entry 1 is fixed, the rest spread
#: hue by the golden angle (i * 137.508 deg, s = 0.82, v alternating
#: 0.95/0.72) and are frozen here as literals
PERIOD_PALETTE = (
    (255, 220, 0), (44, 242, 102), (121, 33, 184), (242, 217, 44), (33, 158, 184),
    (242, 44, 151), (71, 184, 33), (52, 44, 242), (184, 83, 33), (44, 242, 168),
    (171, 33, 184), (201, 242, 44), (33, 108, 184), (242, 44, 85), (33, 184, 46),
    (118, 44, 242), (184, 134, 33), (44, 242, 234), (184, 33, 146), (134, 242, 44),
    (33, 58, 184), (242, 69, 44), (33, 184, 96), (185, 44, 242), (183, 184, 33),
    (44, 184, 242), (184, 33, 95), (68, 242, 44), (59, 33, 184), (242, 135, 44),
)


@dataclass(frozen=True)
class RasterImage:
    """8-bit RGB rows, row 0 at the top (max x2 / max K2)."""

    width: int
    height: int
    pixels: np.ndarray  # uint8, shape (height, width, 3)


def _boundary_color(code: int) -> tuple[int, int, int]:
    return {
        CODE_ORIGIN: COLOR_ORIGIN,
        CODE_AXIS1: COLOR_AXIS1,
        CODE_AXIS2: COLOR_AXIS2,
        CODE_UNRESOLVED: COLOR_UNRESOLVED,
    }.get(code, COLOR_APERIODIC)


def render_period_grid(grid: PeriodGrid) -> RasterImage:
    res = grid.resolution
    img = np.zeros((res, res, 3), dtype=np.uint8)
    flipped = grid.codes[::-1]  # top row = max K2
    for code in np.unique(flipped):
        c = int(code)
        if 0 < c <= len(PERIOD_PALETTE):
            color = PERIOD_PALETTE[c - 1]
        elif c > 0:
            color = COLOR_APERIODIC
        else:
            color = _boundary_color(c)
        img[flipped == code] = color
    return RasterImage(res, res, img)


def render_basin_raster(raster: BasinRaster) -> RasterImage:
    res = raster.resolution
    img = np.zeros((res, res, 3), dtype=np.uint8)
    flipped = raster.codes[::-1]  # top row = max x2
    for code in np.unique(flipped):
        c = int(code)
        if c > 0:
            color = INTERIOR_COLORS[(c - 1) % len(INTERIOR_COLORS)]
        else:
            color = _boundary_color(c)
        img[flipped == code] = color
    return RasterImage(res, res, img)


def emit_raster(target, path) -> None:
    """Write a PeriodGrid, BasinRaster, or RasterImage as binary PPM (P6)."""
    if isinstance(target, PeriodGrid):
        image = render_period_grid(target)
    elif isinstance(target, BasinRaster):
        image = render_basin_raster(target)
    else:
        image = target
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(image.pixels.astype(np.uint8, copy=False).tobytes())
