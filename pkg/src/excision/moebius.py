"""Determinant-one 2x2 matrices acting on the upper half-plane.

Covers exactly the geometry this project needs: order-two elliptic elements
(trace 0, so A fixes w = (alpha + i)/gamma and acts as a half-turn), the
region

    U(A) = { X + iY : |(X - alpha/gamma)^2 - Y^2| < 1/gamma^2 }

inside which A raises the apex of every h-line (an "uplift region", bounded
by two Euclidean hyperbolas), isometric circles, images of real-centered
circles, axes of hyperbolic elements, and the apex of the h-line joining two
elliptic fixed points.

All h-lines are Euclidean semicircles with real centers; operations that
would produce a vertical line raise instead of widening the types.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath as mp

from .errors import (
    GammaZero,
    NotHyperbolic,
    PoleOnCircle,
    SamePoint,
    VerticalAxis,
    VerticalLine,
)
from .scalars import Context, Surd

Scalar = Union[int, Fraction, Surd, mp.mpf]


@dataclass(frozen=True)
class Mat2:
    """Row-major 2x2 matrix ((a, b), (c, d)), normally of determinant one."""

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    def __mul__(self, o: "Mat2") -> "Mat2":
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def det(self) -> Scalar:
        return self.a * self.d - self.b * self.c

    def trace(self) -> Scalar:
        return self.a + self.d

    def inverse(self) -> "Mat2":
        # valid for determinant one
        return Mat2(self.d, -self.b, -self.c, self.a)

    @staticmethod
    def translation(t) -> "Mat2":
        one = Fraction(1) if isinstance(t, (int, Fraction)) else mp.mpf(1)
        zero = one - one
        return Mat2(one, t, zero, one)

    def conjugate_by_translation(self, t) -> "Mat2":
        """S^t * M * S^(-t); leaves the lower-left entry unchanged."""
        return Mat2(
            self.a + t * self.c,
            self.b + t * (self.d - self.a) - t * t * self.c,
            self.c,
            self.d - t * self.c,
        )

    def normalized_gamma_positive(self) -> "Mat2":
        """Sign representative with positive lower-left entry."""
        return -self if self.c < 0 else self

    def is_order_two(self, ctx: Context) -> bool:
        """Trace zero and determinant one (half-turn about the fixed point)."""
        if ctx.exact:
            return self.trace() == 0 and self.det() == 1
        with ctx.workprec():
            ad = ctx.mpf(self.a) * ctx.mpf(self.d)
            bc = ctx.mpf(self.b) * ctx.mpf(self.c)
            tr = ctx.mpf(self.a) + ctx.mpf(self.d)
            tol = ctx.eq_tol() * (1 + abs(ad) + abs(bc))
            return abs(tr) <= tol and abs(ad - bc - 1) <= tol


@dataclass(frozen=True)
class Point:
    """X + iY in the upper half-plane (Y > 0)."""

    x: Scalar
    y: Scalar


@dataclass(frozen=True)
class Circle:
    """Circle (equivalently, non-vertical h-line) with real center."""

    center: Scalar
    radius: Scalar

    @property
    def apex(self) -> Point:
        return Point(self.center, self.radius)


HLine = Circle


class RegionPosition(enum.Enum):
    INSIDE_MINUS = "inside-"
    INSIDE_PLUS = "inside+"
    UPPER_BOUNDARY = "upper-boundary"
    LOWER_BOUNDARY = "lower-boundary"
    OUTSIDE = "outside"

    @property
    def inside(self) -> bool:
        return self in (RegionPosition.INSIDE_MINUS, RegionPosition.INSIDE_PLUS)

    @property
    def on_boundary(self) -> bool:
        return self in (RegionPosition.UPPER_BOUNDARY, RegionPosition.LOWER_BOUNDARY)


class HeightEffect(enum.Enum):
    RAISED = "raised"
    LOWERED = "lowered"
    PRESERVED = "preserved"


def generator_matrices(params) -> tuple[Mat2, Mat2, Mat2]:
    """Order-two generators (T0, T1, T2) with T2*T1*T0 = z -> z + a.

    T0 = [[0, -a/c], [c/a, 0]], T1 = [[a/c, *], [b/a, -a/c]],
    T2 = [[a - b/c, *], [1, -(a - b/c)]]; the * entries are forced by
    det = 1.  Their fixed points have heights a/c, a/b, 1, i.e. inverse
    heights (c/a, b/a, 1).
    """
    a, b, c = params.a, params.b, params.c

    def build():
        one = params.ctx.scalar(1)
        t0 = Mat2(one - one, -(a / c), c / a, one - one)
        beta1 = -a * (c * c + a * a) / (b * c * c)
        t1 = Mat2(a / c, beta1, b / a, -(a / c))
        diag = a - b / c
        t2 = Mat2(diag, -(one + diag * diag), one, -diag)
        return t0, t1, t2

    if params.ctx.exact:
        return build()
    with params.ctx.workprec():
        return build()


def mobius_apply(m: Mat2, z: Point, ctx: Context) -> Point:
    """(a z + b)/(c z + d) componentwise; preserves Y > 0 for det 1."""
    def go(a, b, c, d, zx, zy):
        u = c * zx + d
        den = u * u + c * c * zy * zy
        x = ((a * zx + b) * u + a * c * zy * zy) / den
        y = zy * (a * d - b * c) / den
        return Point(x, y)

    if ctx.exact:
        return go(_frac(m.a), _frac(m.b), _frac(m.c), _frac(m.d), z.x, z.y)
    with ctx.workprec():
        return go(ctx.mpf(m.a), ctx.mpf(m.b), ctx.mpf(m.c), ctx.mpf(m.d),
                  ctx.mpf(z.x), ctx.mpf(z.y))


def _frac(x):
    return Fraction(x) if isinstance(x, (int, Fraction)) else x


def fixed_point(m: Mat2, ctx: Context) -> Point:
    """Fixed point ((alpha/gamma), 1/|gamma|) of a trace-zero element."""
    if m.c == 0:
        raise GammaZero("element fixes infinity")
    if ctx.exact:
        c = _frac(m.c)
        return Point(_frac(m.a) / c, 1 / abs(c))
    with ctx.workprec():
        c = ctx.mpf(m.c)
        return Point(ctx.mpf(m.a) / c, 1 / abs(c))


def isometric_circle(m: Mat2, ctx: Context) -> Circle:
    """Circle of center -delta/gamma, radius 1/|gamma|.

    For an order-two element it is inscribed in the uplift region and its
    topmost point is the fixed point.
    """
    if m.c == 0:
        raise GammaZero("no isometric circle for an affine map")
    if ctx.exact:
        c = _frac(m.c)
        return Circle(-(_frac(m.d) / c), 1 / abs(c))
    with ctx.workprec():
        c = ctx.mpf(m.c)
        return Circle(-(ctx.mpf(m.d) / c), 1 / abs(c))


def image_circle(m: Mat2, circ: Circle, ctx: Context) -> Circle:
    """Image of a real-centered circle, in closed form.

    Decompose m (for gamma != 0) as z -> alpha/gamma - (1/gamma^2)/(z +
    delta/gamma); the inversion step sends C(c, r) to
    C(c/(c^2 - r^2), r/|c^2 - r^2|), so the whole image stays exact when
    the inputs are.  Raises PoleOnCircle when c^2 = r^2 after recentering
    (the image would be a vertical line).
    """
    def go(a, b, c, d, cc, rr, tol=None):
        if c == 0:
            scale = a / d
            return Circle(scale * cc + b / d, abs(scale) * rr)
        c1 = cc + d / c
        den = c1 * c1 - rr * rr
        degenerate = den == 0 if tol is None else abs(den) <= tol * max(abs(c1 * c1), abs(rr * rr))
        if degenerate:
            raise PoleOnCircle("circle passes through the pole")
        g2 = c * c
        return Circle(a / c - (c1 / den) / g2, (rr / abs(den)) / g2)

    if ctx.exact:
        return go(_frac(m.a), _frac(m.b), _frac(m.c), _frac(m.d),
                  circ.center, circ.radius)
    with ctx.workprec():
        return go(ctx.mpf(m.a), ctx.mpf(m.b), ctx.mpf(m.c), ctx.mpf(m.d),
                  ctx.mpf(circ.center), ctx.mpf(circ.radius), ctx.boundary_tol())


def uplift_classify(m: Mat2, p: Point, ctx: Context) -> RegionPosition:
    """Locate p relative to U(m): strictly inside (left/right of the fixed
    point), on a boundary hyperbola, or outside.

    Exact mode compares exactly; float mode uses relative tolerance
    2^(16-p) on max(|q|, 1/gamma^2) for the boundary verdicts.
    """
    if m.c == 0:
        raise GammaZero("no uplift region for an affine map")

    def classify(q, bound, x, cx, tol):
        if tol is None:
            hi_eq = q == -bound
            lo_eq = q == bound
            inside = -bound < q < bound
        else:
            hi_eq = abs(q + bound) <= tol
            lo_eq = abs(q - bound) <= tol
            inside = -bound < q < bound
        if hi_eq:
            return RegionPosition.UPPER_BOUNDARY
        if lo_eq:
            return RegionPosition.LOWER_BOUNDARY
        if inside:
            return RegionPosition.INSIDE_MINUS if x < cx else RegionPosition.INSIDE_PLUS
        return RegionPosition.OUTSIDE

    if ctx.exact:
        cc = _frac(m.c)
        cx = _frac(m.a) / cc
        dx = p.x - cx
        q = dx * dx - p.y * p.y
        bound = 1 / (cc * cc)
        return classify(q, bound, p.x, cx, None)
    with ctx.workprec():
        cx = ctx.mpf(m.a) / ctx.mpf(m.c)
        dx = ctx.mpf(p.x) - cx
        y = ctx.mpf(p.y)
        q = dx * dx - y * y
        bound = 1 / (ctx.mpf(m.c) ** 2)
        # the boundary test q = +-bound cancels two O(dx^2 + y^2) terms, so
        # the tolerance scales with those intermediates, not with |q| alone
        scale = max(abs(q), bound, dx * dx, y * y, mp.mpf(1))
        return classify(q, bound, ctx.mpf(p.x), cx, ctx.boundary_tol() * scale)


def raises_height(m: Mat2, line: HLine, ctx: Context) -> HeightEffect:
    """Compare the radius of the image h-line with the original.

    Agrees with uplift_classify at the apex: inside -> RAISED, boundary ->
    PRESERVED, outside -> LOWERED.
    """
    img = image_circle(m, line, ctx)
    if ctx.exact:
        if img.radius == line.radius:
            return HeightEffect.PRESERVED
        return HeightEffect.RAISED if img.radius > line.radius else HeightEffect.LOWERED
    with ctx.workprec():
        r0 = ctx.mpf(line.radius)
        r1 = ctx.mpf(img.radius)
        if abs(r1 - r0) <= ctx.boundary_tol() * max(r0, r1):
            return HeightEffect.PRESERVED
        return HeightEffect.RAISED if r1 > r0 else HeightEffect.LOWERED


def axis(m: Mat2, ctx: Context) -> HLine:
    """H-line joining the two real fixed points of a hyperbolic element."""
    if ctx.exact:
        tr = m.trace()
        if not tr * tr > 4:
            raise NotHyperbolic(f"trace {tr}")
        if m.c == 0:
            raise VerticalAxis("one fixed point at infinity")
        cc = _frac(m.c)
        center = (_frac(m.a) - _frac(m.d)) / (2 * cc)
        radius = ctx.sqrt(tr * tr - 4) / (2 * abs(cc))
        return HLine(center, radius)
    with ctx.workprec():
        tr = ctx.mpf(m.a) + ctx.mpf(m.d)
        if not abs(tr) > 2:
            raise NotHyperbolic(f"trace {mp.nstr(tr, 8)}")
        if m.c == 0:
            raise VerticalAxis("one fixed point at infinity")
        c = ctx.mpf(m.c)
        center = (ctx.mpf(m.a) - ctx.mpf(m.d)) / (2 * c)
        radius = mp.sqrt(tr * tr - 4) / (2 * abs(c))
        return HLine(center, radius)


def apex_of_pair(m1: Mat2, m2: Mat2, ctx: Context) -> Point:
    """Apex of the h-line through the fixed points of two order-two elements.

    Symmetric in its arguments.  Raises SamePoint / VerticalLine when the
    fixed points coincide or are vertically aligned.
    """
    p = fixed_point(m1, ctx)
    q = fixed_point(m2, ctx)
    def go():
        if p.x == q.x:
            if p.y == q.y:
                raise SamePoint("coincident fixed points")
            raise VerticalLine("vertically aligned fixed points")
        center = (q.x * q.x + q.y * q.y - p.x * p.x - p.y * p.y) / (2 * (q.x - p.x))
        dx = p.x - center
        return center, dx * dx + p.y * p.y

    if ctx.exact:
        center, rad_sq = go()
        return Point(center, ctx.sqrt(rad_sq))
    with ctx.workprec():
        center, rad_sq = go()
        return Point(center, mp.sqrt(rad_sq))


def orthogonal_circles(c1: Circle, c2: Circle, ctx: Context) -> bool:
    """True iff the circles meet at right angles: (c1-c2)^2 = r1^2 + r2^2."""
    if ctx.exact:
        d = c1.center - c2.center
        return d * d == c1.radius * c1.radius + c2.radius * c2.radius
    with ctx.workprec():
        d = ctx.mpf(c1.center) - ctx.mpf(c2.center)
        lhs = d * d
        rhs = ctx.mpf(c1.radius) ** 2 + ctx.mpf(c2.radius) ** 2
        return abs(lhs - rhs) <= ctx.boundary_tol() * max(abs(lhs), abs(rhs), mp.mpf(1))


def orthogonality_residual(c1: Circle, c2: Circle, ctx: Context) -> mp.mpf:
    """|(c1-c2)^2 - r1^2 - r2^2| as an mpf, for property reporting."""
    with ctx.workprec():
        d = ctx.mpf(c1.center) - ctx.mpf(c2.center)
        return abs(d * d - ctx.mpf(c1.radius) ** 2 - ctx.mpf(c2.radius) ** 2)
