import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kostlab.curvetopo import NO_CURVE, SMOOTH_ARCS, UNKNOWN, certify_smooth
from kostlab.ensemble import sample
from kostlab.interval import Box2, RealInterval, box_enclosures, interval_eval, restrict_line
from kostlab.polycore import Poly2

CIRCLE = Poly2.from_terms(2, {(2, 0): 1.0, (0, 2): 1.0, (0, 0): -1.0})

finite = st.floats(-1e6, 1e6, allow_nan=False)


def test_interval_rejects_empty():
    with pytest.raises(ValueError):
        RealInterval(1.0, 0.0)


def test_exact_operations_stay_tight():
    a = RealInterval(1.0, 2.0)
    assert a + 1.0 == RealInterval(2.0, 3.0)
    assert a * 2.0 == RealInterval(2.0, 4.0)
    assert RealInterval(-1.0, 2.0) ** 2 == RealInterval(0.0, 4.0)


def test_inexact_sum_rounds_outward():
    s = RealInterval.point(0.1) + 0.2
    assert s.lo < s.hi
    # the exact real sum of the two doubles lies inside
    from fractions import Fraction

    exact = Fraction(0.1) + Fraction(0.2)
    assert Fraction(s.lo) <= exact <= Fraction(s.hi)


@given(a=finite, b=finite, c=finite, d=finite)
def test_product_contains_exact_products(a, b, c, d):
    from fractions import Fraction

    x = RealInterval(min(a, b), max(a, b))
    y = RealInterval(min(c, d), max(c, d))
    z = x * y
    for u in (a, b):
        for v in (c, d):
            assert Fraction(z.lo) <= Fraction(u) * Fraction(v) <= Fraction(z.hi)


def test_interval_eval_examples():
    enc = interval_eval(CIRCLE, Box2.from_bounds(2, 3, 0, 1))
    assert enc.lo > 0 and enc.contains(RealInterval(3.0, 9.0))
    five = Poly2.from_terms(0, {(0, 0): 5.0})
    assert interval_eval(five, Box2.from_bounds(-7, 3, 1, 2)) == RealInterval(5.0, 5.0)
    x = Poly2.from_terms(1, {(1, 0): 1.0})
    assert interval_eval(x, Box2.from_bounds(-1, 1, 0, 0)) == RealInterval(-1.0, 1.0)


def test_inclusion_isotonicity_random():
    rng = np.random.default_rng(7)
    misses = 0
    for t in range(2000):
        d = int(rng.integers(1, 7))
        p = sample(2, d, 100, t).to_poly()
        x0, y0 = rng.uniform(-3, 3, size=2)
        w, h = rng.uniform(0, 1, size=2) ** 3
        box = Box2.from_bounds(x0, x0 + w, y0, y0 + h)
        enc = interval_eval(p, box)
        cx, cy, rx, ry = x0 + w / 2, y0 + h / 2, w / 2, h / 2
        tay = box_enclosures(p.c, np.array([cx]), np.array([cy]), np.array([rx]), np.array([ry]))
        pts = rng.uniform(size=(50, 2)) * [w, h] + [x0, y0]
        v = p(pts[:, 0], pts[:, 1])
        gx, gy = p.dx()(pts[:, 0], pts[:, 1]), p.dy()(pts[:, 0], pts[:, 1])
        misses += np.count_nonzero((v < enc.lo) | (v > enc.hi))
        misses += np.count_nonzero(np.abs(v - tay.p0[0]) > tay.prad[0])
        misses += np.count_nonzero(np.abs(gx - tay.px0[0]) > tay.pxrad[0])
        misses += np.count_nonzero(np.abs(gy - tay.py0[0]) > tay.pyrad[0])
    assert misses == 0


def test_box_split_tiles_parent():
    b = Box2.from_bounds(-1.0, 2.0, 0.0, 1.0)
    kids = b.split()
    assert sum(k.x.width * k.y.width for k in kids) == b.x.width * b.y.width
    assert all(k.depth == 1 for k in kids)
    assert {k.x.lo for k in kids} == {-1.0, 0.5}


def test_restrict_line_matches_evaluation():
    p = sample(2, 5, 3, 0).to_poly()
    coef, err = restrict_line(p.c, 0, 0.75)
    t = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(np.polynomial.polynomial.polyval(t, coef), p(0.75, t), rtol=1e-12, atol=1e-12)
    assert np.all(err >= 0)


def test_certify_smooth_examples():
    assert certify_smooth(CIRCLE, Box2.from_bounds(2, 3, 2, 3)) == NO_CURVE
    line = Poly2.from_terms(1, {(1, 0): 1.0, (0, 1): -1.0})
    assert certify_smooth(line, Box2.from_bounds(-1, 1, -1, 1)) == SMOOTH_ARCS
    xy = Poly2.from_terms(2, {(1, 1): 1.0})
    for k in range(1, 30, 4):
        r = 2.0**-k
        assert certify_smooth(xy, Box2.from_bounds(-r, r / 3, -r / 5, r)) == UNKNOWN
