"""Figure companions for the delimited outputs.

Every renderer saves a PNG next to a CSV/PPM; rendering is best-effort
presentation, so nothing here feeds back into the numeric layer.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .equilibria import FixedPointRecord, reaction_curves
from .io import render_basin_raster, render_period_grid
from .mapcore import border_curves, orbit
from .params import ModelParams


def _finish(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def save_equilibria_figure(params: ModelParams, records, path) -> None:
    """Phase plane: reaction curves, cap lines, and the fixed-point census."""
    fig, ax = plt.subplots(figsize=(5.5, 5.2))
    phi1, phi2 = reaction_curves(params, 400)
    ax.plot(phi1[:, 0], phi1[:, 1], color="tab:blue", lw=1.2, label="stationarity of group 1")
    ax.plot(phi2[:, 0], phi2[:, 1], color="tab:orange", lw=1.2, label="stationarity of group 2")
    ax.axvline(params.k1, color="gray", lw=0.8, ls="--")
    ax.axhline(params.k2, color="gray", lw=0.8, ls="--")
    for rec in records:
        x, y = rec.location
        if rec.real:
            ax.plot(x, y, "o", ms=7, color="black", mfc="crimson")
        else:
            ax.plot(x, y, "x", ms=7, color="dimgray")
    ax.set_xlim(-0.05, max(params.n1, params.k1) * 1.1)
    ax.set_ylim(-0.05, max(params.n2, params.k2) * 1.1)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.legend(loc="upper right", fontsize=8)
    _finish(fig, path)


def save_orbit_figure(samples: np.ndarray, params: ModelParams, path) -> None:
    """Time series of both coordinates plus the phase-plane trace."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    t = np.arange(len(samples))
    ax1.plot(t, samples[:, 0], lw=0.9, label="x1")
    ax1.plot(t, samples[:, 1], lw=0.9, label="x2")
    ax1.set_xlabel("step")
    ax1.set_ylabel("state")
    ax1.legend(fontsize=8)
    ax2.plot(samples[:, 0], samples[:, 1], ".-", ms=2.5, lw=0.4, color="tab:purple")
    ax2.axvline(params.k1, color="gray", lw=0.8, ls="--")
    ax2.axhline(params.k2, color="gray", lw=0.8, ls="--")
    ax2.set_xlabel("x1")
    ax2.set_ylabel("x2")
    _finish(fig, path)


def save_map1d_figure(xs: np.ndarray, ys: np.ndarray, cap: float, path, title: str) -> None:
    """Graph of a 1-D map with the identity line and the clamp level."""
    fig, ax = plt.subplots(figsize=(5.2, 5.0))
    ax.plot(xs, ys, color="tab:red", lw=1.4)
    lo, hi = float(xs[0]), float(xs[-1])
    ax.plot([lo, hi], [lo, hi], color="black", lw=0.8)
    ax.axhline(cap, color="gray", lw=0.8, ls="--")
    ax.set_xlabel("x")
    ax.set_ylabel(title)
    _finish(fig, path)


def save_curves_figure(curves, diag_marks, n_cap: float, path) -> None:
    """Bifurcation curve families in the cap plane."""
    fig, ax = plt.subplots(figsize=(5.5, 5.2))
    for curve in curves:
        pts = curve.points
        if len(pts) == 0:
            continue
        ax.plot(pts[:, 0], pts[:, 1], lw=1.3, label=curve.curve_id)
    for name, value in diag_marks:
        ax.plot([value], [value], "k.", ms=6)
        ax.annotate(name, (value, value), fontsize=7, xytext=(3, 3), textcoords="offset points")
    ax.set_xlim(0, n_cap)
    ax.set_ylim(0, n_cap)
    ax.set_xlabel("K1")
    ax.set_ylabel("K2")
    ax.legend(fontsize=8)
    _finish(fig, path)


def save_thresholds_figure(params: ModelParams, thresholds, path) -> None:
    """Diagonal restriction with the threshold clamp levels marked."""
    from .bcb import _diag_value

    fig, ax = plt.subplots(figsize=(5.5, 4.6))
    xs = np.linspace(0.0, params.n1, 600)
    ys = [max(_diag_value(params, float(x)), 0.0) for x in xs]
    ax.plot(xs, ys, color="tab:red", lw=1.4, label="diagonal map")
    ax.plot(xs, xs, color="black", lw=0.8)
    for name, value in (
        ("fixed point meets cap", thresholds.k_fp_bcb),
        ("corner loses stability", thresholds.k_bar),
        ("plateau disappears", thresholds.k_smooth),
    ):
        ax.axhline(value, lw=0.8, ls="--")
        ax.annotate(f"{name} ({value:.4f})", (0.02, value), fontsize=7,
                    xytext=(2, 2), textcoords="offset points")
    ax.set_xlabel("x")
    ax.set_ylabel("image")
    ax.legend(fontsize=8)
    _finish(fig, path)


def save_grid_figure(grid, path) -> None:
    image = render_period_grid(grid)
    fig, ax = plt.subplots(figsize=(5.6, 5.2))
    extent = (*grid.k1_range, *grid.k2_range)
    ax.imshow(image.pixels, origin="upper", extent=extent, aspect="auto",
              interpolation="nearest")
    ax.set_xlabel("K1")
    ax.set_ylabel("K2")
    _finish(fig, path)


def save_basins_figure(raster, path) -> None:
    image = render_basin_raster(raster)
    fig, ax = plt.subplots(figsize=(5.6, 5.2))
    extent = raster.window
    ax.imshow(image.pixels, origin="upper", extent=extent, aspect="auto",
              interpolation="nearest")
    for code, pts in raster.legend.items():
        if code > 0:
            ax.plot(pts[:, 0], pts[:, 1], "k.", ms=2)
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    _finish(fig, path)


def save_slices_figure(slices, vary: str, path) -> None:
    """1-D bifurcation diagram: witness samples against the varying cap."""
    fig, ax = plt.subplots(figsize=(6.2, 4.6))
    for s in slices:
        ax.plot(np.full(len(s.samples), s.value), s.samples, ",", color="tab:red")
    ax.set_xlabel(vary.upper())
    ax.set_ylabel("x2" if vary == "k1" else "x1")
    _finish(fig, path)
