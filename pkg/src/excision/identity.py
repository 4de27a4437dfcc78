"""Excision intervals on Y = a/2, geodesic lengths, and the McShane sum.

Each order-two element A = [[alpha, beta], [gamma, -alpha]] with |gamma| >
2/a cuts the horizontal line Y = a/2 in the open interval

    ( alpha/gamma + r_low,  alpha/gamma + a - r_low ),
    r_low = sqrt(a^2/4 - 1/gamma^2),

the crossing of U+(A) together with U-(S^a A S^-a).  Its width depends only
on z = |gamma|:

    w(z) = a - sqrt(a^2 - 4/z^2),

and w(z)/(2a) = 1/(1 + e^l) where l = 2 ln eps, eps the larger root of
eps + 1/eps = a*z, is the length of the simple closed geodesic indexed by
the tree node carrying z.  Summing w(z)/(2a) over the whole tree plus the
two distinguished contributions (z = b/a and z = 1, the inverse heights of
the fixed points of T1 and T2) converges to 1/2 from below: McShane's
identity.

Widths are evaluated in the cancellation-free form (4/z^2)/(a +
sqrt(a^2 - 4/z^2)); the naive difference loses every digit once z^2
outruns the working precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath as mp

from .errors import DomainError, NotHyperbolic, OverlapDetected
from .fricke import Budget, FrickeParams, TreeNode, enumerate_tree, root_node
from .moebius import Mat2
from .scalars import CompensatedSum, Surd

SPECIAL_LEFT = "special:left"    # S^-a T2 S^a, z = 1
SPECIAL_RIGHT = "special:right"  # T1, z = b/a


def lower_crossing_height(z, params: FrickeParams):
    """sqrt(a^2/4 - 1/z^2): height where the lower boundaries of U+(A) and
    U-(S^a A S^-a) cross; also the apex height of the axis of S^a A."""
    a = params.a
    if params.exact:
        q = Fraction(a * a) / 4 - 1 / Fraction(z * z)
        if q <= 0:
            raise DomainError(f"need z > 2/a, got z = {z}")
        return params.ctx.sqrt(q)
    with params.ctx.workprec():
        zf = params.ctx.mpf(z)
        q = params.ctx.mpf(a) ** 2 / 4 - 1 / zf ** 2
        if q <= 0:
            raise DomainError(f"need z > 2/a, got z = {mp.nstr(zf, 8)}")
        return mp.sqrt(q)


def upper_crossing_height(z, params: FrickeParams):
    """sqrt(a^2/4 + 1/z^2): height where the matching upper boundaries cross."""
    a = params.a
    if params.exact:
        if z <= 0:
            raise DomainError("need z > 0")
        q = Fraction(a * a) / 4 + 1 / Fraction(z * z)
        return params.ctx.sqrt(q)
    with params.ctx.workprec():
        zf = params.ctx.mpf(z)
        if zf <= 0:
            raise DomainError("need z > 0")
        return mp.sqrt(params.ctx.mpf(a) ** 2 / 4 + 1 / zf ** 2)


def excision_width(z, params: FrickeParams):
    """Interval width a - sqrt(a^2 - 4/z^2), computed stably.

    Exact mode returns the surd a - 2*sqrt(a^2/4 - 1/z^2); float mode
    returns (4/z^2)/(a + sqrt(a^2 - 4/z^2)) at working precision.
    """
    if params.exact:
        r = lower_crossing_height(z, params)
        return params.a - 2 * r if isinstance(r, (int, Fraction)) else -(2 * r) + params.a
    with params.ctx.workprec():
        a = params.ctx.mpf(params.a)
        zf = params.ctx.mpf(z)
        q = a * a - 4 / zf ** 2
        if q <= 0:
            raise DomainError(f"need z > 2/a, got z = {mp.nstr(zf, 8)}")
        return (4 / zf ** 2) / (a + mp.sqrt(q))


def width_mpf(z, params: FrickeParams) -> mp.mpf:
    """Stable width as an mpf regardless of mode (used by accumulation)."""
    with params.ctx.workprec():
        a = params.ctx.mpf(params.a)
        zf = params.ctx.mpf(z)
        q = a * a - 4 / zf ** 2
        if q <= 0:
            raise DomainError(f"need z > 2/a, got z = {mp.nstr(zf, 8)}")
        return (4 / zf ** 2) / (a + mp.sqrt(q))


def geodesic_length(z, params: FrickeParams) -> mp.mpf:
    """2 ln eps for the larger root eps of eps + 1/eps = a*z."""
    with params.ctx.workprec():
        t = params.ctx.mpf(params.a) * params.ctx.mpf(z)
        if t <= 2:
            raise NotHyperbolic(f"trace {mp.nstr(t, 8)} <= 2")
        eps = (t + mp.sqrt(t * t - 4)) / 2
        return 2 * mp.log(eps)


def summand(z, params: FrickeParams):
    """Identity summand 1/(1 + e^l), evaluated as width(z)/(2a)."""
    w = excision_width(z, params)
    if params.exact:
        return w / (2 * Fraction(params.a)) if isinstance(w, (int, Fraction)) \
            else w * (1 / (2 * Fraction(params.a)))
    with params.ctx.workprec():
        return w / (2 * params.ctx.mpf(params.a))


def summand_mpf(z, params: FrickeParams) -> mp.mpf:
    with params.ctx.workprec():
        return width_mpf(z, params) / (2 * params.ctx.mpf(params.a))


@dataclass(frozen=True)
class ExcisionInterval:
    """Open interval (lo, hi) on Y = a/2 cut out by one order-two element."""

    lo: object
    hi: object
    source: str
    zvalue: object

    def width_value(self, params: FrickeParams) -> mp.mpf:
        with params.ctx.workprec():
            return params.ctx.mpf(self.hi) - params.ctx.mpf(self.lo)


def excision_interval(elem: Mat2, params: FrickeParams, source: str = "") -> ExcisionInterval:
    """Interval of one element from its matrix entries.

    Requires the fixed point below Y = a/2, i.e. |gamma| > 2/a.
    """
    a = params.a
    if params.exact:
        g = abs(Fraction(elem.c))
        if g * a <= 2:
            raise DomainError(f"fixed point too high: |gamma| = {g}")
        center = Fraction(elem.a) / Fraction(elem.c)
        r = lower_crossing_height(g, params)
        return ExcisionInterval(r + center, -r + (center + a), source, g)
    with params.ctx.workprec():
        # abs() on an mpf rounds at the ambient precision, so it must
        # happen inside the working-precision block
        g = abs(params.ctx.mpf(elem.c))
        if g * params.ctx.mpf(a) <= 2:
            raise DomainError("fixed point too high")
        center = params.ctx.mpf(elem.a) / params.ctx.mpf(elem.c)
        r = lower_crossing_height(g, params)
        return ExcisionInterval(center + r, center + params.ctx.mpf(a) - r, source, g)


def special_elements(params: FrickeParams) -> list[tuple[Mat2, str]]:
    """The two distinguished order-two elements of the normalized picture.

    T1 carries z = b/a; T2 enters translated by -a (the normalization that
    folds its right region back into the ambient interval) and carries
    z = 1.
    """
    node = root_node(params)
    t1 = node.F
    if params.exact:
        t2_shifted = node.G.conjugate_by_translation(-params.a)
    else:
        with params.ctx.workprec():
            t2_shifted = node.G.conjugate_by_translation(-params.a)
    return [(t2_shifted, SPECIAL_LEFT), (t1, SPECIAL_RIGHT)]


def special_z_values(params: FrickeParams):
    one = params.ctx.scalar(1)
    if params.exact:
        return [one, params.b / params.a]
    with params.ctx.workprec():
        return [one, params.b / params.a]


def ambient_interval(params: FrickeParams):
    """Length-a window on Y = a/2 containing every excision interval.

    Runs from the left endpoint of the translated-T2 crossing to the left
    endpoint of the T2 crossing.
    """
    shifted, _ = special_elements(params)[0]
    iv = excision_interval(shifted, params, SPECIAL_LEFT)
    if params.exact:
        return iv.lo, iv.lo + params.a
    with params.ctx.workprec():
        return iv.lo, iv.lo + params.ctx.mpf(params.a)


@dataclass(frozen=True)
class SumReport:
    """Accumulated identity sum and its distance from 1/2."""

    partial_sum: mp.mpf      # sum of interval widths
    normalized: mp.mpf       # partial_sum / (2a)
    node_count: int
    max_z: object
    deficiency: mp.mpf       # 1/2 - normalized
    monotone: bool           # partial sums never decreased
    bounded: bool            # normalized never exceeded 1/2 + 2^-100

    def as_dict(self, params: FrickeParams) -> dict:
        from .scalars import scalar_str
        prec = params.ctx.prec
        return {
            "partial_sum": scalar_str(self.partial_sum, prec),
            "normalized": scalar_str(self.normalized, prec),
            "node_count": self.node_count,
            "max_z": scalar_str(self.max_z, prec),
            "deficiency": scalar_str(self.deficiency, prec),
            "monotone": self.monotone,
            "bounded": self.bounded,
        }


def mcshane_sum(params: FrickeParams, budget: Budget) -> SumReport:
    """Sum the widths of the two specials plus every budgeted tree node.

    Accumulation is Neumaier-compensated at working precision in a fixed
    order (specials, then nodes ascending in z), so results are identical
    across runs.
    """
    budget.validate()
    prec = params.ctx.prec
    acc = CompensatedSum(prec)
    with mp.workprec(prec):
        two_a = 2 * params.ctx.mpf(params.a)
        cap = mp.mpf(0.5) + mp.mpf(2) ** -100
    monotone = True
    bounded = True
    prev = mp.mpf(0)
    count = 0
    max_z = None

    def feed(width):
        nonlocal prev, monotone, bounded
        acc.add(width)
        cur = acc.value()
        if cur < prev:
            monotone = False
        with mp.workprec(prec):
            if cur / two_a > cap:
                bounded = False
        prev = cur

    for zval in special_z_values(params):
        feed(width_mpf(zval, params))
    for node in enumerate_tree(params, budget):
        feed(width_mpf(node.z, params))
        count += 1
        max_z = node.z
    total = acc.value()
    with mp.workprec(prec):
        normalized = total / two_a
        deficiency = mp.mpf(0.5) - normalized
    return SumReport(total, normalized, count, max_z if max_z is not None else 0,
                     deficiency, monotone, bounded)


@dataclass(frozen=True)
class LayoutReport:
    intervals: tuple
    ambient: tuple
    total_excised: mp.mpf


def _interval_sources(params: FrickeParams, level: Optional[int],
                      budget: Optional[Budget]) -> list[tuple[Mat2, str, object]]:
    """Specials plus node elements selected by L/R-level (and extra budget)."""
    out = []
    for elem, tag in special_elements(params):
        if params.exact:
            z = abs(Fraction(elem.c))
        else:
            with params.ctx.workprec():
                z = abs(params.ctx.mpf(elem.c))
        out.append((elem, tag, z))
    inner = Budget(
        max_depth=(level + 1) if level is not None
        else (budget.max_depth if budget else None),
        max_z=budget.max_z if budget else None,
        max_nodes=budget.max_nodes if budget else None,
    )
    if inner.max_depth is None and inner.max_z is None and inner.max_nodes is None:
        raise BudgetedLayoutError("interval selection needs a level or budget")
    for node in enumerate_tree(params, inner):
        if level is not None and node.level > level:
            continue
        out.append((node.E, node.path, node.z))
    return out


class BudgetedLayoutError(ValueError):
    pass


def interval_layout(params: FrickeParams, level: Optional[int] = None,
                    budget: Optional[Budget] = None) -> LayoutReport:
    """All excision intervals (specials + nodes with L/R-level <= `level`,
    intersected with `budget` if given), sorted, checked disjoint and inside
    the ambient window.

    Disjointness is exact in exact mode (surd endpoint comparison); any
    violation raises OverlapDetected, which indicates a bug, not data.
    """
    sources = _interval_sources(params, level, budget)
    intervals = [excision_interval(elem, params, tag) for elem, tag, _ in sources]
    if params.exact:
        intervals.sort(key=_SurdKey)
    else:
        intervals.sort(key=lambda iv: iv.lo)
    amb_lo, amb_hi = ambient_interval(params)
    prev = None
    acc = CompensatedSum(params.ctx.prec)
    for iv in intervals:
        if _gt(iv.lo, iv.hi, params):
            raise OverlapDetected(f"inverted interval from {iv.source}")
        if _gt(amb_lo, iv.lo, params) or _gt(iv.hi, amb_hi, params):
            raise OverlapDetected(f"interval from {iv.source} leaves the ambient window")
        if prev is not None and _gt(prev.hi, iv.lo, params):
            raise OverlapDetected(f"{prev.source} overlaps {iv.source}")
        acc.add(iv.width_value(params))
        prev = iv
    return LayoutReport(tuple(intervals), (amb_lo, amb_hi), acc.value())


class _SurdKey:
    """Sort adapter: exact surd comparison for interval lower endpoints."""

    __slots__ = ("iv",)

    def __init__(self, iv):
        self.iv = iv

    def __lt__(self, other):
        return _lt_scalar(self.iv.lo, other.iv.lo)


def _lt_scalar(u, v) -> bool:
    if isinstance(u, Surd) or isinstance(v, Surd):
        u = u if isinstance(u, Surd) else Surd(u)
        return u < v
    return u < v


def _gt(u, v, params) -> bool:
    if params.exact:
        if isinstance(u, Surd) or isinstance(v, Surd):
            u = u if isinstance(u, Surd) else Surd(u)
            return u > v
        return u > v
    with params.ctx.workprec():
        return params.ctx.mpf(u) > params.ctx.mpf(v)


def length_spectrum(params: FrickeParams, budget: Budget) -> list[tuple[mp.mpf, int]]:
    """Simple length spectrum with multiplicities, ascending.

    Groups the budgeted nodes plus the two specials by z (exact equality;
    equal z-values are computed identically in float mode), then maps
    z -> 2 ln eps.
    """
    budget.validate()
    groups: dict = {}
    order: list = []

    def add(z):
        key = z if params.exact else mp.mpf(z)._mpf_
        if key not in groups:
            groups[key] = [z, 0]
            order.append(key)
        groups[key][1] += 1

    for zval in special_z_values(params):
        add(zval)
    for node in enumerate_tree(params, budget):
        add(node.z)
    entries = [(geodesic_length(z, params), z, mult) for z, mult in
               (groups[k] for k in order)]
    entries.sort(key=lambda t: t[0])
    return [(length, mult) for length, _, mult in entries]
