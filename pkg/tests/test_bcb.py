"""Bifurcation curves, diagonal thresholds, 1-D cycle records."""
import math

import numpy as np
import pytest

from segdyn import canonical, symmetric
from segdyn.bcb import (
    BcbCurve,
    CycleRecord,
    NoRootError,
    bcb_2cycle_saddle_node,
    bcb_equilibrium_curves,
    bcb_smoothness_curves,
    bcb_sn2_curve,
    bce1_k2,
    bce2_k1,
    bcp1_k1,
    bcp2_k2,
    diagonal_thresholds,
    find_cycles_1d,
    symbolic_itinerary,
)
from segdyn.mapcore import eval_F
from segdyn.params import ModelParams
from segdyn.restrict import (
    build_restriction,
    eval_1d,
    flat_branch_interval,
    g_return_spec,
)
from segdyn.roots import bisect_root, golden_max

CANON = canonical(1.4, 1.1)
SYM = symmetric(1.0)


def diag_value(params, x):
    return eval_F(params, (x, x))[0]


def test_thresholds_canonical():
    th = diagonal_thresholds(SYM)
    assert th.k_fp_bcb == 1.125
    assert th.k_bar == pytest.approx(1.0, abs=1e-12)
    assert th.x_c == pytest.approx(0.8903882, abs=1e-6)
    # independent oracle: the hump height of the diagonal cubic
    _, peak = golden_max(lambda x: diag_value(SYM, x), 0.5, 1.4, xtol=1e-12)
    assert th.k_smooth == pytest.approx(peak, abs=1e-9)
    assert th.k_smooth == pytest.approx(1.3863833, abs=1e-6)


def test_thresholds_reject_bad_parameters():
    with pytest.raises(ValueError):
        diagonal_thresholds(ModelParams(1.0, 1.2, 4.0, 4.0, 1.5, 1.5, 1.0, 1.0))
    with pytest.raises(ValueError):
        diagonal_thresholds(ModelParams(1.0, 1.0, 0.9, 0.9, 1.5, 1.5, 1.0, 1.0))


def test_slope_level_matches_finite_difference_bisection():
    rng = np.random.default_rng(23)
    h = 1e-7
    for _ in range(50):
        g = rng.uniform(0.3, 1.5)
        t = rng.uniform(1.5, 6.0)
        n = rng.uniform(0.8, 2.0)
        p = ModelParams(g, g, t, t, n, n, n / 2, n / 2)
        th = diagonal_thresholds(p)

        def fd_slope_plus_one(x):
            return (diag_value(p, x + h) - diag_value(p, x - h)) / (2 * h) + 1.0

        oracle = bisect_root(fd_slope_plus_one, th.x_c, 4.0 * th.k_bar, xtol=1e-11)
        assert th.k_bar == pytest.approx(oracle, abs=1e-6)  # FD limits accuracy


def test_bce_closed_forms():
    assert bce1_k2(CANON, 0.4) == pytest.approx(1.1733333, abs=1e-7)
    assert bce1_k2(CANON, 1.125) == pytest.approx(1.125, abs=1e-12)
    assert bce2_k1(CANON, 1.125) == pytest.approx(1.125, abs=1e-12)
    crossing = bisect_root(lambda k2: bce2_k1(CANON, k2) - 1.0, 1.0, 1.3, xtol=1e-10)
    assert crossing == pytest.approx(1.1830127, abs=1e-7)


def test_bce_curves_satisfy_defining_equation():
    e1, e2 = bcb_equilibrium_curves(CANON, (0.05, 1.45), 301)
    assert (e1.curve_id, e2.curve_id) == ("BCe1", "BCe2")
    assert e1.closed_form and e2.closed_form
    for k1, k2 in e1.points:
        assert abs(k2 - k1 * CANON.tau1 * (1.0 - k1 / CANON.n1)) <= 1e-12
    for k1, k2 in e2.points:
        assert abs(k1 - k2 * CANON.tau2 * (1.0 - k2 / CANON.n2)) <= 1e-12
    with pytest.raises(ValueError):
        bcb_equilibrium_curves(CANON, (0.1, 1.0), 1)


def test_bcp_closed_forms():
    assert bcp2_k2(CANON, 1.0) == pytest.approx(4.0 / 3.0, abs=1e-9)
    assert bcp1_k1(CANON, 1.0) == pytest.approx(4.0 / 3.0, abs=1e-9)
    root = bisect_root(lambda k1: bcp2_k2(CANON, k1) - 1.37, 0.9, 1.0, xtol=1e-10)
    assert root == pytest.approx(0.963, abs=2e-3)


def test_bcp_samples_match_golden_section_maximum():
    p1, p2 = bcb_smoothness_curves(CANON, (0.3, 1.3), 41)
    assert (p1.curve_id, p2.curve_id) == ("BCp1", "BCp2")
    for k1, k2 in p2.points[::8]:
        def h(x, a=1.0 - CANON.gamma2 * k1):
            return x * (a + CANON.gamma2 * CANON.tau2 * x * (1.0 - x / CANON.n2))

        xs = np.linspace(0.0, CANON.n2, 512)
        i = int(np.argmax([h(v) for v in xs]))
        _, peak = golden_max(h, float(xs[i - 1]), float(xs[i + 1]), xtol=1e-12)
        assert k2 == pytest.approx(peak, abs=1e-9)


def test_bcp_mirror_symmetry():
    p = symmetric(1.0)
    for k in np.linspace(0.1, 1.6, 100):
        assert bcp1_k1(p, float(k)) == pytest.approx(bcp2_k2(p, float(k)), abs=1e-9)


def test_bcp_undefined_when_radicand_negative():
    with pytest.raises(ValueError):
        bcp2_k2(CANON, 3.5)
    with pytest.raises(ValueError):
        bcb_smoothness_curves(CANON, (0.5, 4.0), 8)


def test_bcp2_diagonal_crossing_flips_the_flat_branch():
    crossing = bisect_root(lambda k: bcp2_k2(CANON, k) - k, 1.0, 1.3, xtol=1e-10)
    below = build_restriction(canonical(crossing - 1e-4, crossing - 1e-4), "f2")
    above = build_restriction(canonical(crossing + 1e-4, crossing + 1e-4), "f2")
    assert flat_branch_interval(below) is not None
    assert flat_branch_interval(above) is None


def test_sn2_root_and_no_root():
    root = bcb_2cycle_saddle_node(CANON, 1.42)
    assert 0.4930 <= root <= 0.4940
    u = eval_F(CANON, (root, 1.42))
    assert abs(eval_F(CANON, u)[0] - root) <= 1e-8
    # the branch continues down to small caps; first bracket wins
    assert bcb_2cycle_saddle_node(CANON, 1.0) == pytest.approx(0.551284, abs=1e-5)
    # weak coupling keeps the corner's second iterate strictly below the cap
    weak = ModelParams(0.5, 0.5, 2.0, 2.0, 1.5, 1.5, 1.4, 1.4)
    with pytest.raises(NoRootError):
        bcb_2cycle_saddle_node(weak, 1.4)


def test_sn2_degenerates_to_corner_fixed_point_on_the_diagonal():
    # where the two corner-collision curves meet, the second-iterate condition
    # collapses to the first-iterate one and the residual vanishes identically
    u = eval_F(CANON, (1.125, 1.125))
    assert u[0] == pytest.approx(1.125, abs=1e-12)
    assert eval_F(CANON, u)[0] - 1.125 == pytest.approx(0.0, abs=1e-12)


def test_sn2_curve_points_satisfy_residual():
    curve = bcb_sn2_curve(CANON, (1.30, 1.48), 10)
    assert curve.curve_id == "SN2" and not curve.closed_form
    assert len(curve.points) == 10
    for k1, k2 in curve.points:
        u = eval_F(CANON, (k1, k2))
        assert abs(eval_F(CANON, u)[0] - k1) <= 1e-9


def freeze_cycles(k, max_period=30):
    return find_cycles_1d(build_restriction(symmetric(k), "diag"), max_period)


def test_cycle_cascade_on_the_diagonal():
    c1 = [c for c in freeze_cycles(1.0) if c.period == 1 and c.points[0] > 0.5]
    assert len(c1) == 1 and c1[0].superstable and c1[0].word == "F"
    assert c1[0].points[0] == 1.0

    c2 = [c for c in freeze_cycles(1.2) if c.period == 2]
    assert len(c2) == 1
    assert c2[0].superstable and c2[0].multiplier == 0.0
    assert c2[0].points[0] == pytest.approx(0.912, abs=1e-9)
    assert c2[0].points[1] == pytest.approx(1.2, abs=1e-9)
    assert c2[0].word == "FR"

    c4 = [c for c in freeze_cycles(1.26) if c.period == 4]
    assert len(c4) == 1 and c4[0].superstable
    assert c4[0].word.count("F") == 1
    m = build_restriction(symmetric(1.26), "diag")
    expected = {1.26}
    x = 1.26
    for _ in range(3):
        x = eval_1d(m, x)[0]
        expected.add(x)
    assert all(
        min(abs(pt - e) for e in expected) <= 1e-9 for pt in c4[0].points
    )

    c3 = [c for c in freeze_cycles(1.2895) if c.period == 3]
    assert len(c3) == 1


def test_superstable_cycles_have_exactly_one_flat_point():
    for k in (1.15, 1.2, 1.26, 1.2895, 1.33, 1.38):
        for c in freeze_cycles(k):
            if c.superstable:
                assert c.word.count("F") == 1


def test_cycle_points_map_cyclically():
    m = build_restriction(symmetric(1.26), "diag")
    for c in find_cycles_1d(m, 30):
        for i, x in enumerate(c.points):
            nxt = c.points[(i + 1) % c.period]
            assert eval_1d(m, x)[0] == pytest.approx(nxt, abs=1e-9)


def test_find_cycles_validation():
    m = build_restriction(SYM, "diag")
    with pytest.raises(ValueError):
        find_cycles_1d(m, 0)
    with pytest.raises(ValueError):
        find_cycles_1d(m, 65)
    with pytest.raises(TypeError):
        find_cycles_1d("diag", 8)
    with pytest.raises(ValueError):
        find_cycles_1d(g_return_spec(CANON), 8)  # params missing


def test_return_map_sees_the_corner_two_cycle():
    p = canonical(0.4937, 1.42)
    cycles = find_cycles_1d(g_return_spec(p), 8, params=p)
    hit = [c for c in cycles if c.period == 1 and abs(c.points[0] - p.k1) <= 1e-9]
    assert len(hit) == 1
    assert hit[0].superstable and hit[0].word == "F"


def test_itinerary_words():
    m = build_restriction(symmetric(1.2), "diag")
    (c2,) = (c for c in find_cycles_1d(m, 8) if c.period == 2)
    assert symbolic_itinerary(m, c2) == "FR"
    assert symbolic_itinerary(m, [c2.points[1], c2.points[0]]) == "FR"  # rotation
    m0 = build_restriction(SYM, "diag")
    assert symbolic_itinerary(m0, [1.0]) == "F"
    with pytest.raises(ValueError):
        symbolic_itinerary(m, [0.3, 0.4])
