"""Map core: evaluation, regions, clamped step, border curves."""
import numpy as np
import pytest

from segdyn import canonical, symmetric
from segdyn.mapcore import (
    RegionId,
    border_curves,
    eval_F,
    orbit,
    region_of,
    step,
    step_arrays,
    tolerance,
)

CANON = canonical(1.4, 1.1)


def test_tolerance_values():
    assert tolerance(CANON, 1, 0.0) == 4.0
    assert tolerance(CANON, 1, 1.5) == 0.0
    assert tolerance(CANON, 2, 1.1) == pytest.approx(1.0666667, abs=1e-7)
    # negative above the population size
    assert tolerance(CANON, 1, 2.0) < 0.0


def test_tolerance_rejects_bad_group():
    with pytest.raises(ValueError):
        tolerance(CANON, 3, 0.5)


def test_eval_F_values():
    assert eval_F(CANON, (0.0, 0.0)) == (0.0, 0.0)
    f1, f2 = eval_F(CANON, (1.4, 0.0))
    assert f1 == pytest.approx(1.9226667, abs=1e-7)
    assert f2 == 0.0
    f1, f2 = eval_F(CANON, (0.2, 1.8))
    assert f1 == pytest.approx(-0.0213333, abs=1e-7)
    assert f2 == pytest.approx(-1.152, abs=1e-9)


def test_region_examples():
    assert region_of(CANON, (0.2, 1.8)) is RegionId.R3
    assert region_of(CANON, (1.4, 1.1)) is RegionId.R1
    f = eval_F(CANON, (1.4, 1.1))
    assert f[0] == pytest.approx(0.38267, abs=1e-5)
    assert f[1] == pytest.approx(0.85067, abs=1e-5)
    # the origin maps to itself; inclusive boundaries resolve to lowest id
    assert region_of(CANON, (0.0, 0.0)) is RegionId.R1


def test_step_examples():
    assert step(CANON, (0.0, 0.0)) == (0.0, 0.0)
    assert step(CANON, (0.2, 1.8)) == (0.0, 0.0)
    p = symmetric(1.2)
    assert step(p, (1.2, 1.2)) == pytest.approx((0.912, 0.912), abs=1e-12)


def test_step_never_emits_negative_zero():
    x = step(CANON, (1.4, 0.0))
    assert str(x[1]) == "0.0"


def test_orbit_lengths_and_fixed_origin():
    pts = orbit(CANON, (0.0, 0.0), 5)
    assert pts == [(0.0, 0.0)] * 6


def test_orbit_superstable_two_cycle():
    p = symmetric(1.2)
    pts = orbit(p, (1.2, 1.2), 3)
    flat = [c for pt in pts for c in pt]
    expect = [1.2, 1.2, 0.912, 0.912, 1.2, 1.2, 0.912, 0.912]
    assert flat == pytest.approx(expect, abs=1e-12)


def test_orbit_corner_region_maps_to_corner():
    # any point of R7 goes to the corner in one step
    p = symmetric(1.0)
    state = (1.0, 1.0)
    assert region_of(p, state) is RegionId.R7
    assert orbit(p, state, 1)[-1] == (1.0, 1.0)


def test_orbit_rejects_negative_length():
    with pytest.raises(ValueError):
        orbit(CANON, (0.1, 0.1), -1)


def _curve(curves, cid):
    return next(c for c in curves if c.curve_id == cid)


def test_border_curve_anchor_points():
    curves = border_curves(CANON, 2001)
    bc1k = _curve(curves, "BC1_K").points
    i = np.argmin(np.abs(bc1k[:, 0] - 1.4))
    assert bc1k[i, 1] == pytest.approx(0.3733333, abs=1e-5)
    bc2k = _curve(curves, "BC2_K").points
    i = np.argmin(np.abs(bc2k[:, 1] - 1.1))
    assert bc2k[i, 0] == pytest.approx(1.1733333, abs=1e-5)
    bc10 = _curve(curves, "BC1_0").points
    assert bc10[0, 0] == 0.0
    assert bc10[0, 1] == pytest.approx(1.0, abs=1e-12)


def test_border_curves_satisfy_defining_equations():
    for cid, component, target in [
        ("BC1_K", 0, CANON.k1),
        ("BC1_0", 0, 0.0),
        ("BC2_K", 1, CANON.k2),
        ("BC2_0", 1, 0.0),
    ]:
        pts = _curve(border_curves(CANON, 513), cid).points
        assert len(pts) > 0
        for x1, x2 in pts:
            f = eval_F(CANON, (x1, x2))
            assert abs(f[component] - target) <= 1e-9


def test_border_curves_resolution_validation():
    with pytest.raises(ValueError):
        border_curves(CANON, 1)


def test_continuity_across_borders():
    # on each border the two adjacent branch images coincide: the clamped
    # component equals the raw one because F_i sits exactly at 0 or K_i
    rng = np.random.default_rng(7)
    for cid, component, target in [
        ("BC1_K", 0, CANON.k1),
        ("BC1_0", 0, 0.0),
        ("BC2_K", 1, CANON.k2),
        ("BC2_0", 1, 0.0),
    ]:
        g1, g2 = CANON.gamma1, CANON.gamma2
        for _ in range(1000):
            if cid.startswith("BC1"):
                x1 = rng.uniform(1e-3, 2.0)
                r = CANON.tau1 * (1.0 - x1 / CANON.n1)
                x2 = (1.0 + g1 * x1 * r - (CANON.k1 / x1 if cid == "BC1_K" else 0.0)) / g1
                if x2 < 0.0:
                    continue
            else:
                x2 = rng.uniform(1e-3, 2.0)
                r = CANON.tau2 * (1.0 - x2 / CANON.n2)
                x1 = (1.0 + g2 * x2 * r - (CANON.k2 / x2 if cid == "BC2_K" else 0.0)) / g2
                if x1 < 0.0:
                    continue
            f = eval_F(CANON, (x1, x2))
            raw = f[component]
            clamped = step(CANON, (x1, x2))[component]
            assert abs(raw - target) <= 1e-9
            assert abs(raw - clamped) <= 1e-9


def test_absorption_into_D():
    rng = np.random.default_rng(11)
    n1, n2 = CANON.n1, CANON.n2
    for _ in range(10_000):
        s = (rng.uniform(0, 2 * n1), rng.uniform(0, 2 * n2))
        s = step(CANON, s)
        assert 0.0 <= s[0] <= CANON.k1 and 0.0 <= s[1] <= CANON.k2
    # longer orbits never leave D after the first step
    for _ in range(100):
        pts = orbit(CANON, (rng.uniform(0, 2 * n1), rng.uniform(0, 2 * n2)), 50)
        for x1, x2 in pts[1:]:
            assert 0.0 <= x1 <= CANON.k1 and 0.0 <= x2 <= CANON.k2


def test_clamp_consistency():
    rng = np.random.default_rng(13)
    for _ in range(1000):
        s = (rng.uniform(0, 3), rng.uniform(0, 3))
        f1, f2 = eval_F(CANON, s)
        expect = (
            min(max(f1, 0.0), CANON.k1) + 0.0,
            min(max(f2, 0.0), CANON.k2) + 0.0,
        )
        assert step(CANON, s) == expect


def test_region_branch_agreement():
    # the image region_of implies must be the image step computes
    rng = np.random.default_rng(17)
    k1, k2 = CANON.k1, CANON.k2
    branch = {
        RegionId.R1: lambda f1, f2: (f1, f2),
        RegionId.R2: lambda f1, f2: (0.0, f2),
        RegionId.R3: lambda f1, f2: (0.0, 0.0),
        RegionId.R4: lambda f1, f2: (0.0, k2),
        RegionId.R5: lambda f1, f2: (k1, f2),
        RegionId.R6: lambda f1, f2: (k1, 0.0),
        RegionId.R7: lambda f1, f2: (k1, k2),
        RegionId.R8: lambda f1, f2: (f1, 0.0),
        RegionId.R9: lambda f1, f2: (f1, k2),
    }
    seen = set()
    for _ in range(5000):
        s = (rng.uniform(0, 3), rng.uniform(0, 3))
        rid = region_of(CANON, s)
        seen.add(rid)
        implied = branch[rid](*eval_F(CANON, s))
        got = step(CANON, s)
        assert got[0] == implied[0] + 0.0 and got[1] == implied[1] + 0.0
    assert len(seen) >= 6  # sampling really exercises several regions


def test_exchange_symmetry():
    p = canonical(1.4, 1.1)
    q = p.swapped()
    a = (0.37, 0.91)
    b = (a[1], a[0])
    for _ in range(1000):
        a = step(p, a)
        b = step(q, b)
        assert a[0] == b[1] and a[1] == b[0]


def test_diagonal_invariance_exact():
    p = symmetric(1.33)
    s = (0.473, 0.473)
    for _ in range(1000):
        s = step(p, s)
        assert s[0] == s[1]


def test_step_arrays_matches_scalar_bitwise():
    rng = np.random.default_rng(23)
    x1 = rng.uniform(0, 2, size=256)
    x2 = rng.uniform(0, 2, size=256)
    v1, v2 = step_arrays(x1, x2, CANON)
    for i in range(256):
        s = step(CANON, (x1[i], x2[i]))
        assert v1[i] == s[0] and v2[i] == s[1]


def test_params_validation():
    with pytest.raises(ValueError):
        canonical(2.0, 1.0)  # cap above population size
    with pytest.raises(ValueError):
        canonical(-0.1, 1.0)
