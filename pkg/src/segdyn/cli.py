"""Command-line front end.

Each subcommand runs one analysis and writes a delimited file (CSV for
tables and 1-D diagrams, binary PPM for grids and basins) plus a PNG figure
next to it unless --no-figure is given.  Flags override config-file keys;
all failures exit nonzero with a one-line diagnostic on stderr.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import figures
from .bcb import (
    bcb_equilibrium_curves,
    bcb_smoothness_curves,
    bcb_sn2_curve,
    diagonal_thresholds,
)
from .equilibria import enumerate_fixed_points
from .io import ConfigError, RunConfig, emit_csv, emit_raster, parse_config
from .mapcore import orbit, region_of
from .params import ModelParams
from .restrict import build_restriction, eval_1d, g_return_spec, return_map_G
from .sweep import basins, sweep1d, sweep2d

_PARAM_FLAGS = ("gamma1", "gamma2", "tau1", "tau2", "n1", "n2", "k1", "k2")


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value settings file")
    common.add_argument("--out", help="output path (default <command>.csv/.ppm)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker processes; never changes output bytes")
    common.add_argument("--no-figure", action="store_true",
                        help="skip the companion PNG")
    for name in _PARAM_FLAGS:
        common.add_argument(f"--{name}", type=float)
    common.add_argument("--transient", type=int)
    common.add_argument("--detect", type=int)
    common.add_argument("--max-period", type=int, dest="max_period")
    common.add_argument("--ics", help="fraction pairs 'a:b,c:d'")
    common.add_argument("--window", help="'x1lo,x1hi,x2lo,x2hi'")
    common.add_argument("--resolution", type=int)

    parser = argparse.ArgumentParser(
        prog="segdyn",
        description="Constrained two-population entry/exit dynamics toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("equilibria", parents=[common],
                   help="fixed-point census with stability")
    p = sub.add_parser("orbit", parents=[common], help="iterate one orbit")
    p.add_argument("--ic", default=None, help="initial state 'x1,x2' (default corner)")
    p.add_argument("--steps", type=int, default=100)
    p = sub.add_parser("restriction", parents=[common],
                       help="1-D restriction samples")
    p.add_argument("--tag", default="diag", choices=["t1", "t2", "f1", "f2", "diag"])
    sub.add_parser("return-map", parents=[common],
                   help="first-return map on the x2-cap line")
    p = sub.add_parser("bcb-curves", parents=[common],
                       help="border-collision curve families in the cap plane")
    p.add_argument("--krange", default=None, help="'lo,hi' cap range")
    sub.add_parser("thresholds", parents=[common],
                   help="diagonal regime thresholds (symmetric parameters)")
    sub.add_parser("sweep2d", parents=[common],
                   help="attractor periods over a cap-plane grid")
    p = sub.add_parser("sweep1d", parents=[common],
                       help="1-D bifurcation diagram along one cap")
    p.add_argument("--vary", default="k2", choices=["k1", "k2"])
    p.add_argument("--fixed", type=float, default=1.0, help="the other cap")
    p.add_argument("--range", dest="vrange", default=None, help="'lo,hi'")
    sub.add_parser("basins", parents=[common],
                   help="basin-of-attraction raster over a phase window")
    return parser


def _load_run(args) -> RunConfig:
    text = ""
    if args.config:
        text = Path(args.config).read_text(encoding="utf-8")
    run = parse_config(text)
    overrides = {n: getattr(args, n) for n in _PARAM_FLAGS if getattr(args, n) is not None}
    if overrides:
        run = dataclasses.replace(
            run, params=dataclasses.replace(run.params, **overrides)
        )
    for name in ("transient", "detect", "max_period", "resolution"):
        value = getattr(args, name)
        if value is not None:
            run = dataclasses.replace(run, **{name: value})
    if args.ics is not None:
        from .io import _parse_ics

        run = dataclasses.replace(run, ics=_parse_ics(args.ics, 0))
    if args.window is not None:
        from .io import _parse_window

        run = dataclasses.replace(run, window=_parse_window(args.window, 0))
    run.scan_config()  # revalidate after overrides
    return run


def _pair(raw: str, what: str) -> tuple[float, float]:
    parts = [p.strip() for p in raw.split(",")]
    if len(parts) != 2:
        raise ConfigError(f"{what} expects 'lo,hi', got {raw!r}")
    return float(parts[0]), float(parts[1])


def _out_path(args, default: str) -> Path:
    return Path(args.out) if args.out else Path(default)


def _figure_path(out: Path) -> Path:
    return out.with_suffix(".png")


def _cmd_equilibria(args, run: RunConfig) -> str:
    records = enumerate_fixed_points(run.params)
    out = _out_path(args, "equilibria.csv")
    rows = []
    for rec in records:
        eig = rec.eigen if rec.eigen is not None else ("", "")
        rows.append(
            (
                rec.family.value,
                float(rec.location[0]),
                float(rec.location[1]),
                int(rec.real),
                rec.region.name,
                rec.stability.value if rec.stability is not None else "",
                eig[0],
                eig[1],
            )
        )
    emit_csv(out, ["family", "x1", "x2", "real", "region", "stability", "eig1", "eig2"], rows)
    if not args.no_figure:
        figures.save_equilibria_figure(run.params, records, _figure_path(out))
    return f"wrote {out} ({len(rows)} fixed points)"


def _cmd_orbit(args, run: RunConfig) -> str:
    params = run.params
    if args.ic is not None:
        state = _pair(args.ic, "--ic")
    else:
        state = (params.k1, params.k2)
    points = orbit(params, state, args.steps)
    out = _out_path(args, "orbit.csv")
    rows = [
        (t, p[0], p[1], region_of(params, p).name)
        for t, p in enumerate(points)
    ]
    emit_csv(out, ["t", "x1", "x2", "region"], rows)
    if not args.no_figure:
        figures.save_orbit_figure(np.array(points), params, _figure_path(out))
    return f"wrote {out} ({len(points)} states)"


def _cmd_restriction(args, run: RunConfig) -> str:
    map1d = build_restriction(run.params, args.tag)
    res = run.resolution or 512
    xs = np.linspace(map1d.domain[0], map1d.domain[1], res)
    values, branches = [], []
    for x in xs:
        v, br = eval_1d(map1d, float(x))
        values.append(v)
        branches.append(type(br.kind).__name__)
    out = _out_path(args, "restriction.csv")
    emit_csv(out, ["x", "value", "branch"], list(zip(xs.tolist(), values, branches)))
    if not args.no_figure:
        figures.save_map1d_figure(
            xs, np.array(values), map1d.k, _figure_path(out), f"{args.tag} restriction"
        )
    return f"wrote {out} ({res} samples of {args.tag})"


def _cmd_return_map(args, run: RunConfig) -> str:
    params = run.params
    spec = g_return_spec(params)
    lo, hi = spec.domain
    res = run.resolution or 512
    xs = np.linspace(lo, hi, res + 1)[1:]  # domain is open at the left end
    ys = [return_map_G(params, float(x)) for x in xs]
    out = _out_path(args, "return-map.csv")
    emit_csv(out, ["x1", "g"], list(zip(xs.tolist(), ys)))
    if not args.no_figure:
        figures.save_map1d_figure(
            xs, np.array(ys), params.k1, _figure_path(out), "first return"
        )
    return f"wrote {out} ({res} samples on ({lo:.6g}, {hi:.6g}])"


def _cmd_bcb_curves(args, run: RunConfig) -> str:
    params = run.params
    if args.krange is not None:
        k_range = _pair(args.krange, "--krange")
    else:
        k_range = (0.05, min(params.n1, params.n2))
    res = run.resolution or 300
    bce1, bce2 = bcb_equilibrium_curves(params, k_range, res)
    bcp1, bcp2 = bcb_smoothness_curves(params, k_range, res)
    sn2 = bcb_sn2_curve(params, k_range, res)
    curves = [bce1, bce2, bcp1, bcp2, sn2]
    rows = []
    for curve in curves:
        for k1, k2 in curve.points:
            rows.append((curve.curve_id, float(k1), float(k2)))
    out = _out_path(args, "bcb-curves.csv")
    emit_csv(out, ["curve", "k1", "k2"], rows)
    if not args.no_figure:
        marks = []
        if params.symmetric:
            th = diagonal_thresholds(params)
            marks = [("fp-cap", th.k_fp_bcb), ("smooth", th.k_smooth)]
        figures.save_curves_figure(
            curves, marks, min(params.n1, params.n2), _figure_path(out)
        )
    return f"wrote {out} ({len(rows)} samples over K in [{k_range[0]}, {k_range[1]}])"


def _cmd_thresholds(args, run: RunConfig) -> str:
    th = diagonal_thresholds(run.params)
    out = _out_path(args, "thresholds.csv")
    emit_csv(
        out,
        ["name", "value"],
        [
            ("fixed_point_meets_cap", th.k_fp_bcb),
            ("corner_loses_stability", th.k_bar),
            ("cubic_argmax", th.x_c),
            ("plateau_disappears", th.k_smooth),
        ],
    )
    if not args.no_figure:
        figures.save_thresholds_figure(run.params, th, _figure_path(out))
    return f"wrote {out} (4 thresholds)"


def _cmd_sweep2d(args, run: RunConfig) -> str:
    window = run.window or (0.0, 1.5, 0.0, 1.5)
    res = run.resolution or 200
    grid = sweep2d(
        run.params,
        (window[0], window[1]),
        (window[2], window[3]),
        res,
        run.scan_config(),
        workers=args.threads,
    )
    out = _out_path(args, "sweep2d.ppm")
    emit_raster(grid, out)
    if not args.no_figure:
        figures.save_grid_figure(grid, _figure_path(out))
    return f"wrote {out} ({res}x{res} cells)"


def _cmd_sweep1d(args, run: RunConfig) -> str:
    if args.vrange is not None:
        vrange = _pair(args.vrange, "--range")
    else:
        cap_n = run.params.n2 if args.vary == "k2" else run.params.n1
        vrange = (1.0, cap_n)
    res = run.resolution or 301
    slices = sweep1d(
        run.params,
        args.vary,
        args.fixed,
        vrange,
        res,
        run.scan_config(),
        workers=args.threads,
    )
    rows = []
    for s in slices:
        for v in s.samples:
            rows.append((s.value, float(v)))
    out = _out_path(args, "sweep1d.csv")
    emit_csv(out, [args.vary, "x2" if args.vary == "k1" else "x1"], rows)
    if not args.no_figure:
        figures.save_slices_figure(slices, args.vary, _figure_path(out))
    return f"wrote {out} ({len(rows)} samples over {res} slices)"


def _cmd_basins(args, run: RunConfig) -> str:
    window = run.window or (0.0, 2.0, 0.0, 2.0)
    res = run.resolution or 400
    raster = basins(run.params, window, res, run.scan_config(), workers=args.threads)
    out = _out_path(args, "basins.ppm")
    emit_raster(raster, out)
    if not args.no_figure:
        figures.save_basins_figure(raster, _figure_path(out))
    labels = len(np.unique(raster.codes))
    return f"wrote {out} ({res}x{res} pixels, {labels} labels)"


_DISPATCH = {
    "equilibria": _cmd_equilibria,
    "orbit": _cmd_orbit,
    "restriction": _cmd_restriction,
    "return-map": _cmd_return_map,
    "bcb-curves": _cmd_bcb_curves,
    "thresholds": _cmd_thresholds,
    "sweep2d": _cmd_sweep2d,
    "sweep1d": _cmd_sweep1d,
    "basins": _cmd_basins,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        run = _load_run(args)
        message = _DISPATCH[args.command](args, run)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"segdyn: error: {exc}", file=sys.stderr)
        return 2
    print(message)
    return 0


if __name__ == "__main__":
    sys.exit(main())
