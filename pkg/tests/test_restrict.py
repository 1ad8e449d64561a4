"""Restrictions to the invariant lines and first-return maps."""
import numpy as np
import pytest

from segdyn import canonical, symmetric
from segdyn.mapcore import eval_F, orbit
from segdyn.restrict import (
    KFlat,
    NoReturnError,
    ReturnMapSpec,
    SECTION_X2,
    SmoothCubic,
    ZeroFlat,
    build_restriction,
    derivative_1d,
    eval_1d,
    first_return,
    flat_branch_interval,
    g_return_spec,
    line_invariant_bounds,
    return_map_G,
)
from segdyn.roots import bisect_root

CANON = canonical(1.4, 1.1)
ALL_TAGS = ("t1", "t2", "f1", "f2")


def test_build_diag_flat_branch_straddles_fixed_point():
    m = build_restriction(symmetric(1.0), "diag")
    flat = flat_branch_interval(m)
    assert flat is not None
    assert flat[0] < 1.0 < flat[1]
    assert eval_1d(m, 1.0)[0] == 1.0  # fixed point on the plateau


def test_build_diag_smooth_above_threshold():
    m = build_restriction(symmetric(1.4), "diag")
    assert flat_branch_interval(m) is None
    assert not any(isinstance(b.kind, KFlat) for b in m.branches)


def test_build_f1_smooth_with_cap_coupling_slope():
    m = build_restriction(CANON, "f1")
    smooth = [b for b in m.branches if isinstance(b.kind, SmoothCubic)]
    assert smooth
    assert smooth[0].kind.a == pytest.approx(-0.1, abs=1e-12)
    left, right = derivative_1d(m, 0.0)
    assert right == pytest.approx(1.0 - CANON.gamma1 * CANON.k2, abs=1e-12)


def test_build_rejects_bad_tag_and_asymmetric_diag():
    with pytest.raises(ValueError):
        build_restriction(CANON, "t3")
    with pytest.raises(ValueError):
        build_restriction(CANON, "diag")  # caps differ


def test_branch_layout_covers_domain_and_agrees_at_borders():
    for tag in ALL_TAGS + ("diag",):
        p = symmetric(1.2) if tag == "diag" else CANON
        m = build_restriction(p, tag)
        assert m.branches[0].lo == 0.0
        assert m.branches[-1].hi == m.domain[1]
        for a, b in zip(m.branches, m.branches[1:]):
            assert a.hi == b.lo
            # the raw cubic meets the flat level at every border
            v = m.raw(a.hi)
            assert min(abs(v - 0.0), abs(v - m.k)) <= 1e-9


def test_eval_examples():
    m = build_restriction(symmetric(1.2), "diag")
    v, br = eval_1d(m, 1.2)
    assert v == pytest.approx(0.912, abs=1e-12)
    assert isinstance(br.kind, SmoothCubic)
    v, br = eval_1d(m, 0.912)
    assert v == 1.2
    assert isinstance(br.kind, KFlat)
    for tag in ALL_TAGS:
        assert eval_1d(build_restriction(CANON, tag), 0.0)[0] == 0.0


def test_eval_rejects_out_of_domain():
    m = build_restriction(CANON, "f2")
    with pytest.raises(ValueError):
        eval_1d(m, m.domain[1] + 0.5)


def test_derivative_examples():
    m = build_restriction(symmetric(1.4), "diag")
    assert derivative_1d(m, 1.0) == pytest.approx((-1.0, -1.0), abs=1e-12)
    m = build_restriction(CANON, "f2")
    left, right = derivative_1d(m, 0.0)
    assert right == pytest.approx(1.0 - CANON.gamma2 * CANON.k1, abs=1e-12)
    # interior of a flat branch
    m = build_restriction(symmetric(1.2), "diag")
    flat = flat_branch_interval(m)
    mid = 0.5 * (flat[0] + flat[1])
    assert derivative_1d(m, mid) == (0.0, 0.0)


def test_derivative_matches_finite_differences():
    rng = np.random.default_rng(31)
    h = 1e-6
    for tag in ALL_TAGS + ("diag",):
        p = symmetric(1.2) if tag == "diag" else CANON
        m = build_restriction(p, tag)
        lo, hi = m.domain
        tested = 0
        while tested < 100:
            x = rng.uniform(lo + 2 * h, hi - 2 * h)
            if any(abs(x - b) < 1e-4 for b in m.borders):
                continue  # FD straddling a border is meaningless
            fd = (eval_1d(m, x + h)[0] - eval_1d(m, x - h)[0]) / (2 * h)
            an = derivative_1d(m, x)[0]
            if an == 0.0:
                assert abs(fd) <= 1e-4
            else:
                assert abs(fd - an) / abs(an) <= 1e-4
            tested += 1


def test_flat_interval_positions_against_bisection_oracle():
    for k in (1.0, 1.2):
        m = build_restriction(symmetric(k), "diag")
        lo, hi = flat_branch_interval(m)

        def resid(x, k=k):
            return eval_F(symmetric(k), (x, x))[0] - k

        # the plateau straddles the smooth maximum near 0.89
        lo_oracle = bisect_root(resid, 0.05, 0.8903882, xtol=1e-12)
        hi_oracle = bisect_root(resid, 0.8903882, 1.5, xtol=1e-12)
        assert lo == pytest.approx(lo_oracle, abs=1e-9)
        assert hi == pytest.approx(hi_oracle, abs=1e-9)
    assert flat_branch_interval(build_restriction(symmetric(1.2), "diag"))[1] < 1.2


def test_line_invariant_bounds_values():
    b = line_invariant_bounds(CANON)
    assert b.x1m == pytest.approx(1.1733333, abs=1e-6)
    assert b.x2m == pytest.approx(0.3733333, abs=1e-6)


def test_axis_restriction_fixed_points():
    # 0 and K1 are fixed, K1 on the plateau, for any valid cap
    rng = np.random.default_rng(37)
    for _ in range(50):
        k1 = rng.uniform(0.1, 1.5)
        p = canonical(k1, 1.0)
        m = build_restriction(p, "t1")
        assert eval_1d(m, 0.0)[0] == 0.0
        v, br = eval_1d(m, k1)
        assert v == k1
        assert isinstance(br.kind, KFlat)


def test_restriction_reproduces_on_line_orbit_exactly():
    # with K1=1 the whole segment x1=K1, x2<=K2 is forward invariant
    p = canonical(1.0, 1.1)
    m = build_restriction(p, "f2")
    pts = orbit(p, (1.0, 0.77), 500)
    x = 0.77
    for t in range(1, 501):
        x = eval_1d(m, x)[0]
        assert pts[t][0] == 1.0
        assert pts[t][1] == x  # bitwise


def test_restriction_agrees_while_orbit_stays_on_line():
    m = build_restriction(CANON, "f2")
    bounds = line_invariant_bounds(CANON)
    pts = orbit(CANON, (1.4, 0.2), 50)
    x = 0.2
    for t in range(1, 51):
        if x > bounds.x2m:
            break  # the next image leaves the line
        x = eval_1d(m, x)[0]
        assert pts[t] == (1.4, x)


def test_return_map_closed_form_matches_numeric():
    spec = g_return_spec(CANON)
    lo, hi = spec.domain
    bounds = line_invariant_bounds(CANON)
    checked = 0
    for x in np.linspace(lo + 1e-6, hi, 40):
        g = return_map_G(CANON, float(x))
        i1, i2 = eval_F(CANON, (float(x), CANON.k2))
        back = eval_F(CANON, (i1, i2))
        two_step = (
            0.0 <= i1 <= CANON.k1
            and 0.0 <= i2 <= CANON.k2
            and back[1] >= CANON.k2
            and lo < back[0] <= CANON.k1
        )
        if not two_step:
            continue
        value, intermediates = first_return(CANON, spec, float(x))
        assert intermediates == 1
        assert value == pytest.approx(g, abs=1e-9)
        checked += 1
    assert checked >= 20


def test_return_map_domain_is_guarded():
    bounds = line_invariant_bounds(CANON)
    with pytest.raises(ValueError):
        return_map_G(CANON, bounds.x1m - 1e-3)
    with pytest.raises(ValueError):
        return_map_G(CANON, CANON.k1 + 1e-3)


def test_return_map_fixed_point_is_returned_to_itself():
    # unstable fixed point of the return map inside the attractor interval
    spec = g_return_spec(CANON)
    lo, hi = spec.domain

    def resid(x):
        return return_map_G(CANON, x) - x

    xs = np.linspace(lo + 1e-6, hi, 200)
    vals = [resid(float(x)) for x in xs]
    bracket = next(
        (i for i in range(len(xs) - 1) if vals[i] * vals[i + 1] < 0), None
    )
    assert bracket is not None
    xstar = bisect_root(resid, float(xs[bracket]), float(xs[bracket + 1]), xtol=1e-12)
    value, intermediates = first_return(CANON, spec, xstar)
    assert intermediates == 1
    assert value == pytest.approx(xstar, abs=1e-9)


def test_first_return_corner_fixed_point_zero_intermediates():
    p = symmetric(1.0)
    spec = ReturnMapSpec(section=SECTION_X2, domain=(0.5, 1.0), k=1)
    value, intermediates = first_return(p, spec, 1.0)
    assert value == 1.0
    assert intermediates == 0


def test_first_return_reports_no_return():
    p = symmetric(1.4)
    spec = ReturnMapSpec(section=SECTION_X2, domain=(0.3733334, 1.4), k=1)
    with pytest.raises(NoReturnError):
        first_return(p, spec, 1.4)  # corner image hits the origin
    with pytest.raises(NoReturnError):
        first_return(CANON, g_return_spec(CANON), 1.3, budget=1)


def test_return_spec_validation():
    with pytest.raises(ValueError):
        ReturnMapSpec(section="x3=0", domain=(0.0, 1.0))
    with pytest.raises(ValueError):
        ReturnMapSpec(section=SECTION_X2, domain=(0.0, 1.0), k=0)
