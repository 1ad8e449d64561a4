"""Small scalar solvers: bisection with Newton polish, golden-section max.

The residuals in this package are low-degree polynomials, so enclosure by
bisection plus a single polishing step is both robust and accurate enough
for every tolerance the tests pin.
"""
from __future__ import annotations

from typing import Callable

GOLDEN = 0.6180339887498949  # (sqrt(5) - 1) / 2


def bisect_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = 1e-8,
    polish: bool = True,
) -> float:
    """Root of f in [lo, hi]; endpoints must bracket a sign change.

    Bisects until the bracket is below xtol, then applies one Newton step
    with a central finite-difference slope (kept only if it stays inside
    the original bracket).
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise ValueError(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    a, b = lo, hi
    fa = flo
    while b - a > xtol:
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if fa * fm < 0.0:
            b = m
        else:
            a, fa = m, fm
    x = 0.5 * (a + b)
    if polish:
        h = max(xtol, 1e-10)
        slope = (f(x + h) - f(x - h)) / (2.0 * h)
        if slope != 0.0:
            x_new = x - f(x) / slope
            if lo <= x_new <= hi:
                x = x_new
    return x


def golden_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = 1e-10,
) -> tuple[float, float]:
    """(argmax, max) of a unimodal f on [lo, hi] by golden-section search."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)
