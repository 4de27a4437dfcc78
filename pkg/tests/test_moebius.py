"""Matrix geometry: generators, circle images, uplift regions, axes."""

from __future__ import annotations

import random
from fractions import Fraction

import mpmath as mp
import pytest

from excision.errors import (
    GammaZero,
    NotHyperbolic,
    PoleOnCircle,
    SamePoint,
)
from excision.fricke import validate_params
from excision.moebius import (
    Circle,
    HeightEffect,
    HLine,
    Mat2,
    Point,
    RegionPosition,
    apex_of_pair,
    axis,
    fixed_point,
    generator_matrices,
    image_circle,
    isometric_circle,
    mobius_apply,
    orthogonal_circles,
    raises_height,
    uplift_classify,
)
from excision.scalars import Context, Surd

MODULAR = validate_params(3, 3, 3)
CTX = MODULAR.ctx
F = Fraction


def test_modular_generators():
    t0, t1, t2 = generator_matrices(MODULAR)
    assert t0 == Mat2(F(0), F(-1), F(1), F(0))
    assert t1 == Mat2(F(1), F(-2), F(1), F(-1))
    assert t2 == Mat2(F(2), F(-5), F(1), F(-2))
    for t in (t0, t1, t2):
        assert t.trace() == 0 and t.det() == 1
    assert t2 * t1 * t0 == Mat2.translation(F(3))


def test_general_generators_satisfy_relation():
    params = validate_params("9/4", "9/2", "9/2")
    t0, t1, t2 = generator_matrices(params)
    for t in (t0, t1, t2):
        assert t.trace() == 0 and t.det() == 1
    assert t2 * t1 * t0 == Mat2.translation(F(9, 4))


def test_translation_action_on_i():
    t0, t1, t2 = generator_matrices(MODULAR)
    s3 = t2 * t1 * t0
    img = mobius_apply(s3, Point(F(0), F(1)), CTX)
    assert img == Point(F(3), F(1))


def test_mobius_apply_examples():
    t0, _, _ = generator_matrices(MODULAR)
    assert mobius_apply(t0, Point(F(0), F(1)), CTX) == Point(F(0), F(1))
    assert mobius_apply(t0, Point(F(1), F(1)), CTX) == Point(F(-1, 2), F(1, 2))


def test_image_circle_inversion_formula():
    t0, _, _ = generator_matrices(MODULAR)  # z -> -1/z
    img = image_circle(t0, Circle(F(2), F(1)), CTX)
    assert img == Circle(F(-2, 3), F(1, 3))


def test_image_circle_pole():
    t0, _, _ = generator_matrices(MODULAR)
    # a circle through the pole of z -> -1/z has |center| = radius
    with pytest.raises(PoleOnCircle):
        image_circle(t0, Circle(F(1), F(1)), CTX)
    # the unit circle misses the pole and maps to itself
    assert image_circle(t0, Circle(F(0), F(1)), CTX) == Circle(F(0), F(1))


def test_image_circle_raises_radius_inside_region():
    t0, _, _ = generator_matrices(MODULAR)
    img = image_circle(t0, Circle(F(1, 2), F(3, 5)), CTX)
    # c^2 - r^2 = -11/100, |.| < 1 so the radius grows
    assert img.radius == F(3, 5) / F(11, 100) * 1
    assert img.radius > F(3, 5)


def test_fixed_points_of_generators():
    t0, t1, t2 = generator_matrices(MODULAR)
    assert fixed_point(t0, CTX) == Point(F(0), F(1))
    assert fixed_point(t1, CTX) == Point(F(1), F(1))
    assert fixed_point(t2, CTX) == Point(F(2), F(1))
    with pytest.raises(GammaZero):
        fixed_point(Mat2.translation(F(1)), CTX)


def test_isometric_circles_inscribed():
    t0, t1, _ = generator_matrices(MODULAR)
    assert isometric_circle(t0, CTX) == Circle(F(0), F(1))
    assert isometric_circle(t1, CTX) == Circle(F(1), F(1))
    # topmost point of the isometric circle is the fixed point
    for t in generator_matrices(MODULAR):
        circ = isometric_circle(t, CTX)
        fp = fixed_point(t, CTX)
        assert circ.center == fp.x and circ.radius == fp.y


def test_uplift_classify_examples():
    t0, _, _ = generator_matrices(MODULAR)
    assert uplift_classify(t0, Point(F(1, 2), F(1)), CTX) is RegionPosition.INSIDE_PLUS
    assert uplift_classify(t0, Point(F(-1, 2), F(1)), CTX) is RegionPosition.INSIDE_MINUS
    assert uplift_classify(t0, Point(F(0), F(1)), CTX) is RegionPosition.UPPER_BOUNDARY
    # exact surd coordinate sqrt(2): lower boundary since 2 - 1 = 1
    assert uplift_classify(t0, Point(Surd.sqrt(2), F(1)), CTX) is RegionPosition.LOWER_BOUNDARY
    assert uplift_classify(t0, Point(F(10), F(1)), CTX) is RegionPosition.OUTSIDE


def test_raises_height_examples():
    t0, _, _ = generator_matrices(MODULAR)
    assert raises_height(t0, HLine(F(1, 2), F(3, 5)), CTX) is HeightEffect.RAISED
    assert raises_height(t0, HLine(F(10), F(1)), CTX) is HeightEffect.LOWERED
    # h-line through the fixed point (0, 1): center 1/2, radius sqrt(5)/2
    preserved = raises_height(t0, HLine(F(1, 2), Surd.sqrt(F(5, 4))), CTX)
    assert preserved is HeightEffect.PRESERVED


def test_axis_examples():
    t1 = generator_matrices(MODULAR)[1]
    lifted = Mat2.translation(F(3)) * t1
    assert lifted == Mat2(F(4), F(-5), F(1), F(-1))
    ax = axis(lifted, CTX)
    assert ax.center == F(5, 2)
    assert ax.radius * ax.radius == F(5, 4)
    ax2 = axis(Mat2(F(2), F(1), F(1), F(1)), CTX)
    assert ax2.center == F(1, 2)
    assert ax2.radius * ax2.radius == F(5, 4)
    with pytest.raises(NotHyperbolic):
        axis(Mat2.translation(F(1)), CTX)


def test_apex_of_pair_symmetry_and_value():
    t0, t1, _ = generator_matrices(MODULAR)
    p = apex_of_pair(t1, t0, CTX)
    q = apex_of_pair(t0, t1, CTX)
    assert p == q
    assert p.x == F(1, 2)
    assert p.y * p.y == F(5, 4)
    with pytest.raises(SamePoint):
        apex_of_pair(t0, t0, CTX)


def test_apex_bifurcation_on_upper_boundaries():
    t0, t1, _ = generator_matrices(MODULAR)
    p = apex_of_pair(t0, t1, CTX)
    assert uplift_classify(t0, p, CTX) is RegionPosition.UPPER_BOUNDARY
    assert uplift_classify(t1, p, CTX) is RegionPosition.UPPER_BOUNDARY


def test_orthogonal_circles():
    assert orthogonal_circles(Circle(F(0), F(1)), Circle(Surd.sqrt(2), F(1)), CTX)
    assert not orthogonal_circles(Circle(F(0), F(1)), Circle(F(3), F(1)), CTX)
    # axis of T2*T1 meets the isometric circle of T0 at right angles
    t0, t1, t2 = generator_matrices(MODULAR)
    ax = axis(t2 * t1, CTX)
    assert orthogonal_circles(ax, isometric_circle(t0, CTX), CTX)
    # while the unrelated pairing from the axis of S^3 T1 fails
    ax2 = axis(Mat2.translation(F(3)) * t1, CTX)
    assert not orthogonal_circles(ax2, isometric_circle(t2, CTX), CTX)


def test_random_height_classification_agreement():
    rng = random.Random(40)
    ctx = Context(exact=False, prec=128)
    checked = 0
    for _ in range(800):
        with ctx.workprec():
            alpha = mp.mpf(rng.uniform(-3, 3))
            gamma = mp.mpf(rng.uniform(0.1, 4)) * (1 if rng.random() < 0.5 else -1)
            beta = -(1 + alpha * alpha) / gamma
            m = Mat2(alpha, beta, gamma, -alpha)
            line = HLine(mp.mpf(rng.uniform(-5, 5)), mp.mpf(rng.uniform(0.05, 5)))
        try:
            effect = raises_height(m, line, ctx)
        except PoleOnCircle:
            continue
        pos = uplift_classify(m, line.apex, ctx)
        expected = (HeightEffect.RAISED if pos.inside
                    else HeightEffect.PRESERVED if pos.on_boundary
                    else HeightEffect.LOWERED)
        assert effect is expected
        checked += 1
    assert checked > 700
