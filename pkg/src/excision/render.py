"""SVG emission for the uplift configuration.

Draws, for a chosen cut level, the boundary hyperbolas (X - c)^2 - Y^2 =
+-1/gamma^2 of each selected element's region, the horizontal line Y = a/2
with its excision intervals, puncture and bifurcation apexes, and optionally
the hexagonal fundamental domain with vertices (infinity, e, f, F(e), g,
a + e) where e, f, g are the fixed points of E, F, G.

Plane coordinates run X right / Y up; the SVG viewport flips Y.  Curves are
polylines refined until the sagitta of every segment is below a pixel
tolerance; this is a pure drawing tolerance and nothing downstream consumes
it.  Output is deterministic: fixed float formatting, fixed element order,
and a version tag in the header comment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import EmptyScene
from .fricke import Budget, FrickeParams
from .identity import interval_layout
from .moebius import apex_of_pair, fixed_point, isometric_circle, mobius_apply

GENERATOR_TAG = "excision-render v1"

ALL_LAYERS = ("uplift", "isometric", "line", "intervals", "apexes", "hexagon")


@dataclass(frozen=True)
class SceneSpec:
    """What to draw and where."""

    window: tuple = ((-1.0, 4.0), (0.0, 2.5))   # ((x0, x1), (y0, y1)), Y range > 0 side
    layers: tuple = ("uplift", "line", "intervals", "apexes")
    level: int = 2
    width_px: int = 900
    height_px: int = 560
    max_sagitta_px: float = 0.5

    def validate(self) -> None:
        (x0, x1), (y0, y1) = self.window
        if not (x1 > x0 and y1 > y0):
            raise EmptyScene(f"degenerate window {self.window}")
        if y1 <= 0:
            raise EmptyScene("window lies outside the upper half-plane")
        unknown = [l for l in self.layers if l not in ALL_LAYERS]
        if unknown:
            raise EmptyScene(f"unknown layers {unknown}")
        if not self.layers:
            raise EmptyScene("no layers selected")


def _fmt(v: float) -> str:
    s = f"{v:.4f}"
    return "0.0000" if s == "-0.0000" else s


class _Viewport:
    def __init__(self, scene: SceneSpec):
        (x0, x1), (y0, y1) = scene.window
        self.x0, self.x1, self.y0, self.y1 = x0, x1, y0, y1
        self.sx = scene.width_px / (x1 - x0)
        self.sy = scene.height_px / (y1 - y0)

    def to_px(self, x: float, y: float) -> tuple[float, float]:
        return ((x - self.x0) * self.sx, (self.y1 - y) * self.sy)


def _polyline_points(f, x_lo: float, x_hi: float, vp: _Viewport, tol_px: float) -> list:
    """Adaptive sample of y = f(x) on [x_lo, x_hi] with bounded sagitta."""
    pts = [(x_lo, f(x_lo)), (x_hi, f(x_hi))]
    out = []

    def refine(ax, ay, bx, by, depth):
        mx = (ax + bx) / 2
        my = f(mx)
        # sagitta in pixels against the chord
        chord_my = (ay + by) / 2
        if depth < 18 and abs(my - chord_my) * vp.sy > tol_px:
            refine(ax, ay, mx, my, depth + 1)
            refine(mx, my, bx, by, depth + 1)
        else:
            out.append((bx, by))

    out.append(pts[0])
    refine(pts[0][0], pts[0][1], pts[1][0], pts[1][1], 0)
    return out


def _clip(lo, hi, a, b):
    return max(lo, a), min(hi, b)


def _hyperbola_paths(center: float, k: float, upper: bool, vp: _Viewport,
                     tol_px: float) -> list[list]:
    """Polylines for (X-center)^2 - Y^2 = -k (upper) or +k (lower), k > 0."""
    paths = []
    if upper:
        f = lambda x: math.sqrt((x - center) ** 2 + k)
        x_lo, x_hi = vp.x0, vp.x1
        if x_lo < x_hi:
            paths.append(_polyline_points(f, x_lo, x_hi, vp, tol_px))
        return paths
    half = math.sqrt(k)
    f = lambda x: math.sqrt(max((x - center) ** 2 - k, 0.0))
    left = _clip(vp.x0, vp.x1, vp.x0, center - half)
    if left[0] < left[1]:
        paths.append(_polyline_points(f, left[0], left[1], vp, tol_px))
    right = _clip(vp.x0, vp.x1, center + half, vp.x1)
    if right[0] < right[1]:
        paths.append(_polyline_points(f, right[0], right[1], vp, tol_px))
    return paths


def _arc_through(p: tuple, q: tuple, vp: _Viewport, tol_px: float) -> list:
    """Semicircular h-line segment joining two plane points."""
    (x1, y1), (x2, y2) = p, q
    if abs(x1 - x2) < 1e-12:
        return [p, q]
    c = (x2 * x2 + y2 * y2 - x1 * x1 - y1 * y1) / (2 * (x2 - x1))
    r_sq = (x1 - c) ** 2 + y1 * y1
    f = lambda x: math.sqrt(max(r_sq - (x - c) ** 2, 0.0))
    lo, hi = min(x1, x2), max(x1, x2)
    pts = _polyline_points(f, lo, hi, vp, tol_px)
    if (x1, y1) != pts[0] and abs(pts[0][0] - x1) > abs(pts[0][0] - x2):
        pts.reverse()
    return pts


def _poly_svg(points, vp: _Viewport, cls: str) -> str:
    coords = " ".join("%s,%s" % (_fmt(px), _fmt(py))
                      for px, py in (vp.to_px(x, y) for x, y in points))
    return f'<polyline class="{cls}" fill="none" points="{coords}"/>'


def _float(params: FrickeParams, v) -> float:
    return float(params.ctx.mpf(v))


def render_scene(params: FrickeParams, scene: SceneSpec) -> str:
    """Build the SVG document for one scene; see the module docstring."""
    scene.validate()
    vp = _Viewport(scene)
    tol = scene.max_sagitta_px
    a = _float(params, params.a)
    layout = interval_layout(params, level=scene.level,
                             budget=Budget(max_z=default_render_z_cap(scene.level)))
    from .fricke import enumerate_tree, root_node
    from .cantor import default_z_cap

    ctx = params.ctx
    chunks = []
    chunks.append('<?xml version="1.0" encoding="UTF-8"?>')
    chunks.append(f"<!-- {GENERATOR_TAG} -->")
    chunks.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{scene.width_px}" '
        f'height="{scene.height_px}" viewBox="0 0 {scene.width_px} {scene.height_px}" '
        f'data-plane-window="{_fmt(vp.x0)} {_fmt(vp.x1)} {_fmt(vp.y0)} {_fmt(vp.y1)}">')
    chunks.append(
        "<desc>Uplift configuration; plane X right, Y up; affine map "
        f"px = (X - {_fmt(vp.x0)}) * {_fmt(vp.sx)}, "
        f"py = ({_fmt(vp.y1)} - Y) * {_fmt(vp.sy)}</desc>")
    chunks.append("<style>"
                  ".upper{stroke:#1f77b4;stroke-width:1}"
                  ".lower{stroke:#2ca02c;stroke-width:1}"
                  ".iso{stroke:#bbbbbb;stroke-width:0.8;fill:none}"
                  ".cut{stroke:#d62728;stroke-width:3}"
                  ".half{stroke:#444444;stroke-width:1;stroke-dasharray:6 3}"
                  ".apex{fill:#d62728}"
                  ".bifur{fill:#9467bd}"
                  ".hex{stroke:#ff7f0e;stroke-width:1.4;fill:none}"
                  "</style>")

    nodes = [n for n in enumerate_tree(
        params, Budget(max_depth=scene.level + 1,
                       max_z=default_render_z_cap(scene.level)))
             if n.level <= scene.level]
    elements = [iv for iv in layout.intervals]

    if "uplift" in scene.layers:
        chunks.append('<g id="uplift">')
        for node in nodes:
            e = node.E
            center = _float(params, e.a) / _float(params, e.c)
            k = 1.0 / _float(params, e.c) ** 2
            for upper in (True, False):
                for pts in _hyperbola_paths(center, k, upper, vp, tol):
                    chunks.append(_poly_svg(pts, vp, "upper" if upper else "lower"))
        chunks.append("</g>")

    if "isometric" in scene.layers:
        chunks.append('<g id="isometric">')
        for node in nodes:
            circ = isometric_circle(node.E, ctx)
            cx, cy = vp.to_px(_float(params, circ.center), 0.0)
            r_px = _float(params, circ.radius) * vp.sx
            r_py = _float(params, circ.radius) * vp.sy
            chunks.append(f'<ellipse class="iso" cx="{_fmt(cx)}" cy="{_fmt(cy)}" '
                          f'rx="{_fmt(r_px)}" ry="{_fmt(r_py)}"/>')
        chunks.append("</g>")

    if "line" in scene.layers:
        p0 = vp.to_px(vp.x0, a / 2)
        p1 = vp.to_px(vp.x1, a / 2)
        chunks.append(f'<line class="half" x1="{_fmt(p0[0])}" y1="{_fmt(p0[1])}" '
                      f'x2="{_fmt(p1[0])}" y2="{_fmt(p1[1])}"/>')

    if "intervals" in scene.layers:
        chunks.append('<g id="intervals">')
        for iv in elements:
            lo = _float(params, iv.lo)
            hi = _float(params, iv.hi)
            if hi < vp.x0 or lo > vp.x1:
                continue
            p0 = vp.to_px(max(lo, vp.x0), a / 2)
            p1 = vp.to_px(min(hi, vp.x1), a / 2)
            chunks.append(f'<line class="cut" x1="{_fmt(p0[0])}" y1="{_fmt(p0[1])}" '
                          f'x2="{_fmt(p1[0])}" y2="{_fmt(p1[1])}"/>')
        chunks.append("</g>")

    if "apexes" in scene.layers:
        chunks.append('<g id="apexes">')
        for node in nodes:
            # puncture of the node's trident: apex of the h-line joining
            # the fixed points of G and F
            punct = apex_of_pair(node.G, node.F, ctx)
            px, py = vp.to_px(_float(params, punct.x), _float(params, punct.y))
            chunks.append(f'<circle class="apex" cx="{_fmt(px)}" cy="{_fmt(py)}" r="3"/>')
            # bifurcation apexes of the two child bicorn regions
            with ctx.workprec():
                shifted_e = node.E.conjugate_by_translation(params.a)
            for pair in ((node.G, node.E),
                         (node.F, shifted_e)):
                bif = apex_of_pair(pair[0], pair[1], ctx)
                bx, by = vp.to_px(_float(params, bif.x), _float(params, bif.y))
                chunks.append(f'<circle class="bifur" cx="{_fmt(bx)}" cy="{_fmt(by)}" r="2"/>')
        chunks.append("</g>")

    if "hexagon" in scene.layers:
        root = root_node(params)
        e_pt = fixed_point(root.E, ctx)
        f_pt = fixed_point(root.F, ctx)
        g_pt = fixed_point(root.G, ctx)
        fe_pt = mobius_apply(root.F, e_pt, ctx)
        ex, ey = _float(params, e_pt.x), _float(params, e_pt.y)
        fx, fy = _float(params, f_pt.x), _float(params, f_pt.y)
        gx, gy = _float(params, g_pt.x), _float(params, g_pt.y)
        fex, fey = _float(params, fe_pt.x), _float(params, fe_pt.y)
        top = vp.y1
        pts = [(ex, top), (ex, ey)]
        pts += _arc_through((ex, ey), (fx, fy), vp, tol)[1:]
        pts += _arc_through((fx, fy), (fex, fey), vp, tol)[1:]
        pts += _arc_through((fex, fey), (gx, gy), vp, tol)[1:]
        pts += _arc_through((gx, gy), (a + ex, ey), vp, tol)[1:]
        pts.append((a + ex, top))
        chunks.append('<g id="hexagon">')
        chunks.append(_poly_svg(pts, vp, "hex"))
        chunks.append("</g>")

    chunks.append("</svg>")
    return "\n".join(chunks) + "\n"


def default_render_z_cap(level: int) -> int:
    """Widths below a hundredth of a pixel at typical sizes are invisible."""
    return 1 << max(16, level * 2 + 10)
