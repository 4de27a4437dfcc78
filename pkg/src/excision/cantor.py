"""The complement Cantor set: gaps, box counting, and branch-ratio limits.

Removing every excision interval from the length-a ambient window leaves a
Cantor set (the apexes of highest lifts of simple open geodesics).  At a
finite cut depth the remnant is a finite union of closed intervals, whose
box-counting statistics stand in for the Hausdorff-dimension-zero claim:
the log N / log(1/eps) slope, fitted over scales reaching down to the
depth's own resolution, decays towards zero as the cut deepens.

Along a directed branch of the tree, the ratio of the excision interval of
E to the node-local ambient interval (bounded by the intervals of
S^-a G S^a and of F) is

    (a - 2 r(z)) / (r(x) + r(y) - z/(x y)),    r(t) = sqrt(a^2/4 - 1/t^2),

where z/(x y) = a/2 + sqrt(a^2/4 - 1/x^2 - 1/y^2) holds at every non-root
node.  The ratio tends to 1 unless the branch tail repeats a single move,
in which case the smallest entry freezes at some value x and the limit is
2*sqrt(a^2 - 4/x^2) / (a + sqrt(a^2 - 4/x^2)).  Both numerator and
denominator here cancel catastrophically if evaluated literally; the
implementation rewrites them into sums of single-signed stable terms, so a
few hundred bits suffice even when z carries thousands of digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath as mp

from .errors import (
    BoundViolated,
    DegenerateScales,
    DomainError,
    PrecisionExhausted,
)
from .fricke import Budget, FrickeParams, TreeNode, apply_move, enumerate_tree, minimal_triple, walk_path
from .identity import (
    ambient_interval,
    excision_interval,
    interval_layout,
    lower_crossing_height,
    special_elements,
)
from .scalars import CompensatedSum, Context, fraction_to_mpf


@dataclass(frozen=True)
class GapSet:
    """Closed remnant intervals after cutting to a given L/R level."""

    depth: int
    gaps: tuple              # ((lo, hi) mpf pairs, sorted, disjoint)
    ambient: tuple
    total_gap: mp.mpf
    total_excised: mp.mpf


def default_z_cap(depth: int) -> int:
    """Resolution cap for gap construction at a given depth.

    Intervals narrower than the bottom box-counting scale cannot change
    any box count at the scales used for that depth (a box longer than a
    removed subinterval always still meets the remnant on one side), so
    nodes whose widths fall below that floor are skipped.  The bound
    width(z) ~ 2/(a z^2) turns the scale floor 2^-3(depth+2) into a z cap.
    """
    return 1 << (math.ceil(1.5 * (depth + 2)) + 6)


def build_gaps(params: FrickeParams, depth: int, z_cap=None) -> GapSet:
    """Ambient window minus all excision intervals of L/R-level <= depth
    (both subtree roots count as level 0) plus the two specials."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if z_cap is None:
        z_cap = default_z_cap(depth)
    layout = interval_layout(params, level=depth, budget=Budget(max_z=z_cap))
    prec = params.ctx.prec
    with mp.workprec(prec):
        amb_lo = params.ctx.mpf(layout.ambient[0])
        amb_hi = params.ctx.mpf(layout.ambient[1])
        gaps = []
        cursor = amb_lo
        for iv in layout.intervals:
            lo = params.ctx.mpf(iv.lo)
            hi = params.ctx.mpf(iv.hi)
            if lo > cursor:
                gaps.append((cursor, lo))
            if hi > cursor:
                cursor = hi
        if cursor < amb_hi:
            gaps.append((cursor, amb_hi))
        acc = CompensatedSum(prec)
        for lo, hi in gaps:
            acc.add(hi - lo)
        return GapSet(depth, tuple(gaps), (amb_lo, amb_hi), acc.value(),
                      layout.total_excised)


def middle_thirds_gaps(depth: int, prec: int = 256) -> GapSet:
    """Calibration set: the standard middle-thirds construction on [0, 1].

    At level n it is 2^n closed intervals of length 3^-n; its box-counting
    slope is log 2 / log 3.
    """
    pieces = [(Fraction(0), Fraction(1))]
    for _ in range(depth):
        nxt = []
        for lo, hi in pieces:
            w = (hi - lo) / 3
            nxt.append((lo, lo + w))
            nxt.append((hi - w, hi))
        pieces = nxt
    with mp.workprec(prec):
        gaps = tuple((fraction_to_mpf(lo, prec), fraction_to_mpf(hi, prec))
                     for lo, hi in pieces)
        total = fraction_to_mpf(Fraction(2, 3) ** depth, prec)
        return GapSet(depth, gaps, (mp.mpf(0), mp.mpf(1)), total, 1 - total)


def box_count(gapset: GapSet, scale, prec: int = 256) -> int:
    """Number of grid boxes [k*eps, (k+1)*eps) meeting the remnant set."""
    with mp.workprec(prec):
        eps = fraction_to_mpf(scale, prec)
        if eps <= 0:
            raise DegenerateScales(f"scale {scale} <= 0")
        count = 0
        last = None
        for lo, hi in gapset.gaps:
            k0 = int(mp.floor(lo / eps))
            k1 = int(mp.floor(hi / eps))
            if last is not None and k0 <= last:
                k0 = last + 1
            if k1 >= k0:
                count += k1 - k0 + 1
                last = k1
        return count


@dataclass(frozen=True)
class DimensionEstimate:
    """Per-scale counts with local slopes, plus the least-squares slope."""

    points: tuple            # (scale, count, local_slope or None)
    slope: float


def box_dimension_estimate(gapset: GapSet, scales: Sequence,
                           prec: int = 256) -> DimensionEstimate:
    """Cover the remnant set at each scale; fit log N against log(1/eps).

    Empty gap sets report slope 0.  Scales must be >= 2, positive, and
    pairwise distinct.
    """
    scales = list(scales)
    if len(scales) < 2:
        raise DegenerateScales("need at least two scales")
    with mp.workprec(prec):
        eps_list = [fraction_to_mpf(s, prec) for s in scales]
    if any(e <= 0 for e in eps_list):
        raise DegenerateScales("scales must be positive")
    if len({e._mpf_ for e in eps_list}) != len(eps_list):
        raise DegenerateScales("scales must be distinct")
    if not gapset.gaps:
        points = tuple((e, 0, None) for e in eps_list)
        return DimensionEstimate(points, 0.0)
    counts = [box_count(gapset, e, prec) for e in eps_list]
    with mp.workprec(prec):
        xs = [float(-mp.log(e)) for e in eps_list]
    ys = [math.log(n) for n in counts]
    points = []
    for i, (e, n) in enumerate(zip(eps_list, counts)):
        if i == 0:
            points.append((e, n, None))
        else:
            dx = xs[i] - xs[i - 1]
            points.append((e, n, (ys[i] - ys[i - 1]) / dx if dx else None))
    xbar = sum(xs) / len(xs)
    ybar = sum(ys) / len(ys)
    sxx = sum((x - xbar) ** 2 for x in xs)
    sxy = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys))
    return DimensionEstimate(tuple(points), sxy / sxx if sxx else 0.0)


def dimension_scale_ladder(params: FrickeParams, depth: int,
                           count: int = 16, per_level: float = 3.0) -> list:
    """Default scales for a depth-d gap set: log-spaced from a/2 down to
    a * 2^(-per_level*(depth+2)), i.e. the ladder deepens with the cut so
    the fit always spans the set's resolved structure."""
    prec = params.ctx.prec
    with mp.workprec(prec):
        a = params.ctx.mpf(params.a)
        top = a / 2
        bottom = a * mp.mpf(2) ** (-per_level * (depth + 2))
        ratio = (bottom / top) ** (mp.mpf(1) / (count - 1))
        return [top * ratio ** j for j in range(count)]


# ---------------------------------------------------------------------------
# Branch ratios
# ---------------------------------------------------------------------------


def _ratio_parts(triple, params: FrickeParams, prec: int) -> mp.mpf:
    """Excised-over-ambient ratio from a triple, in cancellation-free form.

    With u = min(x, y) <= v, s = |z/(xy) - a/2|, the node-local ambient
    length r(u) + r(v) - a/2 - s regroups as

        (1/v^2) * [ (1/u^2 + 1/v^2)/(a/2 + s) + (1/u^2 - 1/v^2)/(r(u) + r(v)) ]
        -----------------------------------------------------------------------
                            (r(u) + s) * (r(v) + a/2)

    whose inner terms are all nonnegative, so each factor carries full
    relative precision.
    """
    x, y, z = triple
    exact = params.exact
    if exact:
        u, v = (x, y) if x <= y else (y, x)
        diff = Fraction(v * v - u * u) / Fraction(u * u * v * v)
        zxy = Fraction(z) / Fraction(x * y) if not isinstance(z, Fraction) else z / (x * y)
    with mp.workprec(prec):
        a = fraction_to_mpf(params.a, prec)
        if not exact:
            xf, yf = fraction_to_mpf(x, prec), fraction_to_mpf(y, prec)
            uf, vf = (xf, yf) if xf <= yf else (yf, xf)
            diff = (vf - uf) * (vf + uf) / (uf * uf * vf * vf)
            zxy = fraction_to_mpf(z, prec) / (xf * yf)
        else:
            uf, vf = fraction_to_mpf(u, prec), fraction_to_mpf(v, prec)
            diff = fraction_to_mpf(diff, prec)
            zxy = fraction_to_mpf(zxy, prec)
        zf = fraction_to_mpf(z, prec)
        iu2 = 1 / uf ** 2
        iv2 = 1 / vf ** 2
        s = abs(zxy - a / 2)
        ru = mp.sqrt(a * a / 4 - iu2)
        rv = mp.sqrt(a * a / 4 - iv2)
        numerator = (4 / zf ** 2) / (a + mp.sqrt(a * a - 4 / zf ** 2))
        inner = (iu2 + iv2) / (a / 2 + s) + diff / (ru + rv)
        denominator = iv2 * inner / ((ru + s) * (rv + a / 2))
        if denominator <= 0:
            raise DomainError("degenerate local ambient interval")
        return numerator / denominator


def branch_ratio(node, params: FrickeParams, prec: Optional[int] = None) -> mp.mpf:
    """Ratio of a node's excision interval to its local ambient interval."""
    triple = node.triple if isinstance(node, TreeNode) else tuple(node)
    if any(params.ctx.mpf(t) <= 0 for t in triple):
        raise DomainError("triple entries must be positive")
    return _ratio_parts(triple, params, prec or params.ctx.prec)


def limit_ratio_constant_branch(x, params: FrickeParams) -> mp.mpf:
    """Limit 2*sqrt(a^2 - 4/x^2) / (a + sqrt(a^2 - 4/x^2)) of the ratios
    along a branch that eventually repeats one move with smallest entry x."""
    with params.ctx.workprec():
        a = params.ctx.mpf(params.a)
        xf = params.ctx.mpf(x)
        q = a * a - 4 / xf ** 2
        if q <= 0:
            raise DomainError(f"need x > 2/a, got {mp.nstr(xf, 8)}")
        root = mp.sqrt(q)
        return 2 * root / (a + root)


@dataclass(frozen=True)
class BranchSpec:
    """A directed branch: start node path, repeating move block, iterations."""

    prefix: str = "m"
    block: str = "L"
    iterations: int = 1

    def validate(self) -> None:
        if not self.prefix or self.prefix[0] not in ("m", "n") or \
                any(ch not in ("L", "R") for ch in self.prefix[1:]):
            raise ValueError(f"bad prefix {self.prefix!r}")
        if not self.block or any(ch not in ("L", "R") for ch in self.block):
            raise ValueError(f"block must be a nonempty word over L/R: {self.block!r}")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")


@dataclass(frozen=True)
class ScanReport:
    spec: BranchSpec
    ratios: tuple            # mpf per visited node, block moves flattened
    final_ratio: mp.mpf
    predicted_limit: mp.mpf
    final_gap: mp.mpf        # |final - predicted|
    constant_tail: bool
    max_prec_used: int


class _PrecisionLadder:
    """Working precision that doubles when z outgrows the guard band.

    Keeps 64 guard bits over the 2*log2(z) bits a squared z-entry costs;
    raises PrecisionExhausted at the ceiling.  Exact triples never lose
    digits, so for them this only scales the evaluation precision.
    """

    def __init__(self, base: int, ceiling: int):
        self.prec = base
        self.ceiling = ceiling
        self.max_used = base

    def ensure(self, z) -> int:
        needed = 2 * int(mp.mag(z)) + 64
        while self.prec < needed:
            if 2 * self.prec > self.ceiling:
                raise PrecisionExhausted(
                    f"needs {needed} bits, ceiling {self.ceiling}")
            self.prec *= 2
        self.max_used = max(self.max_used, self.prec)
        return self.prec


def ratio_convergence_scan(spec: BranchSpec, params: FrickeParams,
                           iterations: Optional[int] = None,
                           prec_ceiling: Optional[int] = None) -> ScanReport:
    """Follow `iterations` moves from the prefix node, drawing letters
    cyclically from the block, and report the ratio at every node reached
    together with its distance to the predicted limit.

    Prediction: the closed form when the block repeats a single move (the
    frozen smallest entry is x for an L-tail, y for an R-tail), and 1 for
    a mixed block.  One iteration is one move; z-entries grow doubly
    exponentially along mixed blocks, so whole-block counting would leave
    even modest requests infeasible.
    """
    spec = BranchSpec(spec.prefix, spec.block, iterations or spec.iterations)
    spec.validate()
    ceiling = prec_ceiling if prec_ceiling is not None else max(1 << 16, 8 * params.ctx.prec)
    ladder = _PrecisionLadder(params.ctx.prec, ceiling)
    node = walk_path(params, spec.prefix)
    triple = node.triple
    ratios = []
    for i in range(spec.iterations):
        move = spec.block[i % len(spec.block)]
        if params.exact:
            # exact triples never lose digits; no escalation needed
            triple = apply_move(triple, move, params)
        else:
            ladder.ensure(triple[2])
            with mp.workprec(ladder.prec):
                triple = apply_move(triple, move, params)
        ratios.append(_ratio_parts(triple, params, params.ctx.prec))
    constant_tail = len(set(spec.block)) == 1
    if constant_tail:
        frozen = triple[0] if spec.block[0] == "L" else triple[1]
        predicted = limit_ratio_constant_branch(frozen, params)
    else:
        with params.ctx.workprec():
            predicted = mp.mpf(1)
    final = ratios[-1]
    with params.ctx.workprec():
        gap = abs(final - predicted)
    return ScanReport(spec, tuple(ratios), final, predicted, gap,
                      constant_tail, ladder.max_used)


# ---------------------------------------------------------------------------
# Growth bound along branches
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthReport:
    checked: int
    skipped: int             # nodes before the first move change
    min_margin_log2: float   # min over nodes of log2(bound / z)
    sharper_checked: int     # nodes right after a move change: z < a^2 l^3


def growth_bound_check(moves: str, n_bound: int, params: FrickeParams,
                       start_path: str = "m") -> GrowthReport:
    """Walk `moves` from `start_path`; past the first L/R change verify
    z < (a*l)^(n_bound+2) with l = min(x, y) at each node, and the sharper
    z < a^2 l^3 at the node immediately after every change.

    Move runs longer than `n_bound` are rejected; a failed bound raises
    BoundViolated (it would disprove the growth estimate, so it must never
    fire on valid input).
    """
    if any(ch not in ("L", "R") for ch in moves):
        raise ValueError("moves must be a word over L/R")
    runs = 1
    for i in range(1, len(moves)):
        runs = runs + 1 if moves[i] == moves[i - 1] else 1
        if runs > n_bound:
            raise ValueError(f"block of length {runs} exceeds N = {n_bound}")
    node = walk_path(params, start_path)
    triple = node.triple
    first_change = None
    for i in range(1, len(moves)):
        if moves[i] != moves[i - 1]:
            first_change = i
            break
    checked = skipped = sharper = 0
    min_margin = math.inf
    prec = params.ctx.prec
    for i, move in enumerate(moves):
        triple = apply_move(triple, move, params)
        if first_change is None or i < first_change:
            skipped += 1
            continue
        x, y, z = triple
        l = x if _le(x, y, params) else y
        with mp.workprec(prec):
            a = params.ctx.mpf(params.a)
            lf = params.ctx.mpf(l)
            zf = params.ctx.mpf(z)
            bound_log2 = (n_bound + 2) * mp.log(a * lf, 2)
            z_log2 = mp.log(zf, 2)
            margin = float(bound_log2 - z_log2)
        ok = (Fraction(z) < (Fraction(params.a) * Fraction(l)) ** (n_bound + 2)) \
            if params.exact else margin > 0
        if not ok:
            raise BoundViolated(
                f"z = {z} >= (a*l)^{n_bound + 2} after moves {moves[:i + 1]!r}")
        checked += 1
        min_margin = min(min_margin, margin)
        if i == first_change or (i > 0 and moves[i] != moves[i - 1]):
            ok_sharp = (Fraction(z) < Fraction(params.a) ** 2 * Fraction(l) ** 3) \
                if params.exact else zf < a * a * lf ** 3
            if not ok_sharp:
                raise BoundViolated(
                    f"sharper bound z < a^2 l^3 fails after {moves[:i + 1]!r}")
            sharper += 1
    return GrowthReport(checked, skipped, min_margin, sharper)


def _le(u, v, params) -> bool:
    if params.exact:
        return u <= v
    with params.ctx.workprec():
        return params.ctx.mpf(u) <= params.ctx.mpf(v)
