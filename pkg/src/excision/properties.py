"""Invariant suites behind the `verify` command.

Each group re-derives one cluster of structural facts at run time and
reports a pass flag with a worst-case residual, so a single command can
certify an installation end to end:

  tree        residuals, maximality of z, matrix/triple consistency,
              product relation G*F*E = S^a, involution squares to identity,
              deterministic enumeration
  geometry    height effect of random order-two elements matches the
              region classification of the apex; boundary apexes either
              pass through the fixed point or meet the isometric circle
              at right angles
  relations   on enumerated triples: axes of pairwise products meet the
              remaining factor's isometric circle orthogonally, pair
              apexes land on lower boundaries, closed-form crossings of
              translated regions
  identity    the width form of the summand against 1/(1 + e^l), monotone
              bounded partial sums, layout disjointness and bookkeeping,
              puncture coherence
  cantor      gap totals decreasing, dimension slope ladder decreasing,
              ratio limits along constant and mixed branches, growth bound
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from . import cantor as cantor_mod
from .errors import BoundViolated, OverlapDetected, PoleOnCircle
from .fricke import (
    Budget,
    FrickeParams,
    apply_move,
    apply_move_matrices,
    enumerate_tree,
    minimal_triple,
    root_node,
)
from .identity import (
    SPECIAL_LEFT,
    ambient_interval,
    excision_interval,
    geodesic_length,
    interval_layout,
    lower_crossing_height,
    mcshane_sum,
    summand_mpf,
    upper_crossing_height,
)
from .moebius import (
    HeightEffect,
    HLine,
    Mat2,
    RegionPosition,
    apex_of_pair,
    axis,
    fixed_point,
    isometric_circle,
    orthogonality_residual,
    raises_height,
    uplift_classify,
)


@dataclass
class GroupResult:
    name: str
    passed: bool
    cases: int
    worst_residual: float
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "cases": self.cases,
            "worst_residual": self.worst_residual,
            "notes": list(self.notes),
        }


def _mpf(params, v):
    return params.ctx.mpf(v)


def _arith(params):
    """Precision guard for inline matrix arithmetic (no-op in exact mode)."""
    import contextlib
    return contextlib.nullcontext() if params.exact else params.ctx.workprec()


def check_tree(params: FrickeParams, budget: Budget, perturb: bool = False) -> GroupResult:
    """Structural invariants along the enumerated stream.

    `perturb` is a fault-injection hook: it nudges one matrix entry of one
    node and must make the product-relation check fail.
    """
    res = GroupResult("tree", True, 0, 0.0)
    s_a = params.translation_matrix()
    worst = mp.mpf(0)
    seen_paths = set()
    prev_key = None
    for idx, node in enumerate(enumerate_tree(params, budget)):
        res.cases += 1
        e, f, g = node.mats
        if perturb and idx == 1:
            with _arith(params):
                e = Mat2(e.a + Fraction(1, 7) if params.exact else e.a + mp.mpf("0.001"),
                         e.b, e.c, e.d)
        x, y, z = node.triple
        # adjusted equation residual
        if params.exact:
            residual_ok = x * x + y * y + z * z == params.a * x * y * z
            rel = mp.mpf(0)
        else:
            with params.ctx.workprec():
                lhs = x * x + y * y + z * z
                rhs = params.a * x * y * z
                rel = abs(lhs - rhs) / abs(rhs)
                residual_ok = rel <= mp.mpf(2) ** (16 - params.ctx.prec)
        worst = max(worst, rel)
        if not residual_ok:
            res.passed = False
            res.notes.append(f"equation residual at {node.path}")
        # z maximal
        if not (_ge(z, x, params) and _ge(z, y, params)):
            res.passed = False
            res.notes.append(f"z not maximal at {node.path}")
        # product relation
        with _arith(params):
            prod = g * f * e
        if params.exact:
            prod_ok = prod == s_a
        else:
            with params.ctx.workprec():
                scale = 1 + max(abs(_mpf(params, v)) for v in
                                (e.a, e.b, e.c, e.d, f.a, f.b, f.c, f.d,
                                 g.a, g.b, g.c, g.d)) ** 3
                tol = mp.mpf(2) ** (48 - params.ctx.prec) * scale
                prod_ok = all(
                    abs(_mpf(params, u) - _mpf(params, v)) <= tol
                    for u, v in ((prod.a, s_a.a), (prod.b, s_a.b), (prod.c, s_a.c), (prod.d, s_a.d)))
        if not prod_ok:
            res.passed = False
            res.notes.append(f"product relation fails at {node.path}")
        # matrix / triple consistency and order-two factors; float-mode
        # roundoff accumulates geometrically along move chains, hence the
        # 2^(48-p) certification headroom
        for mat, val in ((g, x), (f, y), (e, z)):
            if params.exact:
                if not mat.is_order_two(params.ctx):
                    res.passed = False
                    res.notes.append(f"factor not order two at {node.path}")
                if abs(mat.c) != val:
                    res.passed = False
                    res.notes.append(f"inverse height mismatch at {node.path}")
            else:
                with params.ctx.workprec():
                    loose = mp.mpf(2) ** (48 - params.ctx.prec)
                    ad = _mpf(params, mat.a) * _mpf(params, mat.d)
                    bc = _mpf(params, mat.b) * _mpf(params, mat.c)
                    mag = 1 + abs(ad) + abs(bc)
                    if abs(_mpf(params, mat.a) + _mpf(params, mat.d)) > loose * mag or \
                            abs(ad - bc - 1) > loose * mag:
                        res.passed = False
                        res.notes.append(f"factor not order two at {node.path}")
                    if abs(abs(_mpf(params, mat.c)) - _mpf(params, val)) > \
                            loose * (1 + abs(_mpf(params, val))):
                        res.passed = False
                        res.notes.append(f"inverse height mismatch at {node.path}")
        # deterministic ascending order
        key = (_mpf(params, z), node.path)
        if prev_key is not None and key[0] < prev_key[0]:
            res.passed = False
            res.notes.append(f"z not ascending at {node.path}")
        prev_key = key
        if node.path in seen_paths:
            res.passed = False
            res.notes.append(f"duplicate path {node.path}")
        seen_paths.add(node.path)
    # involution squared
    root = root_node(params)
    nu = apply_move(minimal_triple(params), "N", params)
    back = (nu[1], nu[0], params.a * nu[0] * nu[1] - nu[2])
    if params.exact and back != minimal_triple(params):
        res.passed = False
        res.notes.append("involution does not square to identity")
    res.worst_residual = float(worst)
    res.notes = res.notes[:8]
    return res


def _ge(u, v, params) -> bool:
    if params.exact:
        return u >= v
    with params.ctx.workprec():
        return params.ctx.mpf(u) >= params.ctx.mpf(v)


def _random_order_two(rng: random.Random, ctx) -> Mat2:
    with ctx.workprec():
        alpha = mp.mpf(rng.uniform(-3.0, 3.0))
        gamma = mp.mpf(0)
        while abs(gamma) < mp.mpf("0.05"):
            gamma = mp.mpf(rng.uniform(-4.0, 4.0))
        beta = -(1 + alpha * alpha) / gamma
        return Mat2(alpha, beta, gamma, -alpha)


def check_geometry(params: FrickeParams, n_cases: int = 10000,
                   seed: int = 20080218) -> GroupResult:
    """Random agreement and boundary tests at working precision."""
    res = GroupResult("geometry", True, 0, 0.0)
    ctx = params.ctx if not params.ctx.exact else params.ctx.__class__(exact=False, prec=params.ctx.prec)
    rng = random.Random(seed)
    worst = mp.mpf(0)
    mismatches = 0
    for _ in range(n_cases):
        a_mat = _random_order_two(rng, ctx)
        with ctx.workprec():
            center = mp.mpf(rng.uniform(-6.0, 6.0))
            radius = mp.mpf(rng.uniform(0.05, 6.0))
        line = HLine(center, radius)
        try:
            effect = raises_height(a_mat, line, ctx)
        except PoleOnCircle:
            continue
        res.cases += 1
        pos = uplift_classify(a_mat, line.apex, ctx)
        expected = (HeightEffect.RAISED if pos.inside
                    else HeightEffect.PRESERVED if pos.on_boundary
                    else HeightEffect.LOWERED)
        if effect is not expected:
            mismatches += 1
            res.passed = False
    if mismatches:
        res.notes.append(f"{mismatches} height/classification mismatches")
    # boundary constructions: lower boundary -> orthogonal to the isometric
    # circle; upper boundary -> passes through the fixed point
    for _ in range(n_cases // 10):
        a_mat = _random_order_two(rng, ctx)
        with ctx.workprec():
            cx = _mpf(params, a_mat.a) / _mpf(params, a_mat.c)
            inv_g = 1 / abs(_mpf(params, a_mat.c))
            offset = mp.mpf(rng.uniform(0.1, 4.0)) + inv_g
            y_low = mp.sqrt(offset * offset - inv_g * inv_g)
            low_line = HLine(cx + offset, y_low)
            resid = orthogonality_residual(low_line, isometric_circle(a_mat, ctx), ctx)
            worst = max(worst, resid)
            y_up = mp.sqrt(offset * offset + inv_g * inv_g)
            up_line = HLine(cx + offset, y_up)
            fp = fixed_point(a_mat, ctx)
            dist = abs((_mpf(params, fp.x) - up_line.center) ** 2 + _mpf(params, fp.y) ** 2
                       - up_line.radius ** 2)
            worst = max(worst, dist)
        res.cases += 2
    if worst > mp.mpf(10) ** -9:
        res.passed = False
        res.notes.append("boundary residual exceeds 1e-9")
    res.worst_residual = float(worst)
    return res


def check_relations(params: FrickeParams, budget: Budget) -> GroupResult:
    """Triple-product geometry on enumerated nodes.

    For each node (E, F, G) with G*F*E = S^a, the three product/factor
    pairings (G*F, E), (F*E, S^-a G S^a), (E * S^-a G S^a, S^-a F S^a)
    are translations times a factor, so each axis must cross the remaining
    factor's isometric circle at right angles; the apex of (F, E) must sit
    on the lower boundary of U(G) and of U(CBABC); and the axis of S^a E
    must crest exactly at (a/2 + alpha/gamma, r(gamma)).
    """
    res = GroupResult("relations", True, 0, 0.0)
    ctx = params.ctx
    worst = mp.mpf(0)
    a = params.a
    for node in enumerate_tree(params, budget):
        e, f, g = node.mats
        with _arith(params):
            g_back = g.conjugate_by_translation(-a)
            f_back = f.conjugate_by_translation(-a)
        orderings = (
            (g, f, e),
            (f, e, g_back),
            (e, g_back, f_back),
        )
        for m1, m2, m3 in orderings:
            with _arith(params):
                prod = m1 * m2
            ax = axis(prod, ctx)
            resid = orthogonality_residual(ax, isometric_circle(m3, ctx), ctx)
            worst = max(worst, resid)
            res.cases += 1
        # apex of (F, E) on the lower boundaries of U(G) and U(CBABC)
        apex = apex_of_pair(f, e, ctx)
        with _arith(params):
            cbabc = e * f * g * f * e
        if params.exact:
            for mat, label in ((g, "lower boundary"), (cbabc, "conjugate lower boundary")):
                if uplift_classify(mat, apex, ctx) is not RegionPosition.LOWER_BOUNDARY:
                    res.passed = False
                    res.notes.append(f"pair apex off {label} at {node.path}")
        else:
            # direct boundary-equation residual with accumulation headroom
            for mat, label in ((g, "lower boundary"), (cbabc, "conjugate lower boundary")):
                with ctx.workprec():
                    dx = _mpf(params, apex.x) - _mpf(params, mat.a) / _mpf(params, mat.c)
                    q = dx * dx - _mpf(params, apex.y) ** 2
                    bound = 1 / _mpf(params, mat.c) ** 2
                    scale = max(abs(q), bound, dx * dx, mp.mpf(1))
                    if abs(q - bound) > mp.mpf(2) ** (48 - ctx.prec) * scale:
                        res.passed = False
                        res.notes.append(f"pair apex off {label} at {node.path}")
        res.cases += 2
        # closed-form crossings of the translated pair
        with _arith(params):
            lifted = params.translation_matrix() * e
            z_e = abs(e.c)
        ax_e = axis(lifted, ctx)
        r_val = lower_crossing_height(z_e, params)
        if params.exact:
            center_ok = Fraction(ax_e.center) == Fraction(a) / 2 + Fraction(e.a) / Fraction(e.c)
            radius_ok = ax_e.radius * ax_e.radius == r_val * r_val
        else:
            with ctx.workprec():
                tol = mp.mpf(2) ** (24 - ctx.prec)
                center_ok = abs(_mpf(params, ax_e.center)
                                - (_mpf(params, a) / 2 + _mpf(params, e.a) / _mpf(params, e.c))) <= tol * _mpf(params, a)
                radius_ok = abs(_mpf(params, ax_e.radius) - _mpf(params, r_val)) <= tol * _mpf(params, a)
        if not (center_ok and radius_ok):
            res.passed = False
            res.notes.append(f"axis crest mismatch at {node.path}")
        # apex of (S^a E S^-a, E) at the upper crossing height
        with _arith(params):
            e_shift = e.conjugate_by_translation(a)
        apex_up = apex_of_pair(e_shift, e, ctx)
        r_up = upper_crossing_height(z_e, params)
        if params.exact:
            up_ok = apex_up.y * apex_up.y == r_up * r_up
        else:
            with ctx.workprec():
                up_ok = abs(_mpf(params, apex_up.y) - _mpf(params, r_up)) <= \
                    mp.mpf(2) ** (24 - ctx.prec) * _mpf(params, a)
        if not up_ok:
            res.passed = False
            res.notes.append(f"upper crossing mismatch at {node.path}")
        res.cases += 2
        # inscribed isometric circle: topmost point is the fixed point
        iso = isometric_circle(e, ctx)
        fp = fixed_point(e, ctx)
        if params.exact:
            if not (iso.center == fp.x and iso.radius == fp.y):
                res.passed = False
                res.notes.append(f"isometric circle not inscribed at {node.path}")
        res.cases += 1
    res.worst_residual = float(worst)
    if worst > mp.mpf(10) ** -9:
        res.passed = False
        res.notes.append("orthogonality residual exceeds 1e-9")
    res.notes = res.notes[:8]
    return res


def check_identity(params: FrickeParams, budget: Budget, n_random: int = 10000,
                   seed: int = 1991) -> GroupResult:
    """Summand identity, sum monotonicity/bound, layout and punctures."""
    res = GroupResult("identity", True, 0, 0.0)
    rng = random.Random(seed)
    worst = mp.mpf(0)
    with params.ctx.workprec():
        a = params.ctx.mpf(params.a)
        lo = 2 / a
        for _ in range(n_random):
            u = mp.mpf(rng.random())
            z = lo * (1 + mp.mpf("1e-6")) * (mp.mpf(10) ** 6 / lo) ** u
            w_form = summand_mpf(z, params)
            l_form = 1 / (1 + mp.e ** geodesic_length(z, params))
            rel = abs(w_form - l_form) / w_form
            worst = max(worst, rel)
            res.cases += 1
    if worst > mp.mpf(2) ** (32 - params.ctx.prec):
        res.passed = False
        res.notes.append("summand forms disagree beyond 2^(32-p)")
    report = mcshane_sum(params, budget)
    res.cases += report.node_count
    if not report.monotone:
        res.passed = False
        res.notes.append("partial sums decreased")
    if not report.bounded:
        res.passed = False
        res.notes.append("normalized sum exceeded 1/2 + 2^-100")
    try:
        layout = interval_layout(params, level=None, budget=budget)
    except OverlapDetected as exc:
        res.passed = False
        res.notes.append(f"overlap: {exc}")
        layout = None
    if layout is not None:
        with params.ctx.workprec():
            total = params.ctx.mpf(layout.total_excised)
            norm = params.ctx.mpf(report.partial_sum)
            drift = abs(total - norm) / norm
        if drift > mp.mpf(2) ** (24 - params.ctx.prec):
            res.passed = False
            res.notes.append("layout width total drifts from the accumulated sum")
        # puncture coherence: each node's puncture is the midpoint of its
        # own interval, sits below Y = a/2, and inside its local gap
        for node in enumerate_tree(params, budget):
            apex = apex_of_pair(node.G, node.F, params.ctx)
            iv = excision_interval(node.E, params, node.path)
            with params.ctx.workprec():
                mid = (params.ctx.mpf(iv.lo) + params.ctx.mpf(iv.hi)) / 2
                ax = params.ctx.mpf(apex.x)
                ay = params.ctx.mpf(apex.y)
                tol = mp.mpf(2) ** (48 - params.ctx.prec) * params.ctx.mpf(params.a)
                if abs(ax - mid) > tol:
                    res.passed = False
                    res.notes.append(f"puncture not centered at {node.path}")
                if not ay < params.ctx.mpf(params.a) / 2:
                    res.passed = False
                    res.notes.append(f"puncture not below the line at {node.path}")
            res.cases += 1
    res.worst_residual = float(worst)
    res.notes = res.notes[:8]
    return res


def check_cantor(params: FrickeParams, depths=(5, 8, 11), scan_iterations: int = 20,
                 n_branches: int = 100, seed: int = 57721) -> GroupResult:
    """Gap bookkeeping, slope ladder, ratio limits, growth bound."""
    res = GroupResult("cantor", True, 0, 0.0)
    prev_total = None
    prev_slope = None
    worst = mp.mpf(0)
    for depth in depths:
        gaps = cantor_mod.build_gaps(params, depth)
        est = cantor_mod.box_dimension_estimate(
            gaps, cantor_mod.dimension_scale_ladder(params, depth), params.ctx.prec)
        with params.ctx.workprec():
            closure = abs(params.ctx.mpf(gaps.total_gap) + params.ctx.mpf(gaps.total_excised)
                          - params.ctx.mpf(params.a)) / params.ctx.mpf(params.a)
        worst = max(worst, closure)
        if closure > mp.mpf(2) ** (24 - params.ctx.prec):
            res.passed = False
            res.notes.append(f"measure bookkeeping fails at depth {depth}")
        if prev_total is not None and not gaps.total_gap < prev_total:
            res.passed = False
            res.notes.append(f"gap total not decreasing at depth {depth}")
        if prev_slope is not None and not est.slope < prev_slope:
            res.passed = False
            res.notes.append(f"slope not decreasing at depth {depth}")
        prev_total = gaps.total_gap
        prev_slope = est.slope
        res.cases += 1 + len(gaps.gaps)
    # ratio limits
    scan_const = cantor_mod.ratio_convergence_scan(
        cantor_mod.BranchSpec("m", "L", scan_iterations + 10), params)
    if scan_const.final_gap > mp.mpf(10) ** -6:
        res.passed = False
        res.notes.append("constant-tail ratio misses its closed-form limit")
    scan_mixed = cantor_mod.ratio_convergence_scan(
        cantor_mod.BranchSpec("m", "LR", scan_iterations), params)
    if scan_mixed.final_gap > mp.mpf(10) ** -6:
        res.passed = False
        res.notes.append("mixed-block ratio does not approach 1")
    res.cases += scan_iterations * 2 + 10
    # growth bound over random bounded-block words
    rng = random.Random(seed)
    try:
        for _ in range(n_branches):
            n_bound = rng.randint(1, 5)
            word = _random_bounded_word(rng, n_bound, 20)
            cantor_mod.growth_bound_check(word, n_bound, params)
            res.cases += 1
    except BoundViolated as exc:
        res.passed = False
        res.notes.append(f"growth bound violated: {exc}")
    res.worst_residual = float(worst)
    res.notes = res.notes[:8]
    return res


def _random_bounded_word(rng: random.Random, n_bound: int, length: int) -> str:
    word = []
    current = rng.choice("LR")
    while len(word) < length:
        run = rng.randint(1, n_bound)
        word.extend(current * min(run, length - len(word)))
        current = "R" if current == "L" else "L"
    return "".join(word)


def verify_all(params: FrickeParams, profile: str = "default",
               perturb: bool = False) -> list[GroupResult]:
    """Run every group; `profile='quick'` shrinks the case counts."""
    quick = profile == "quick"
    tree_budget = Budget(max_z=10 ** 4 if quick else 10 ** 6)
    rel_budget = Budget(max_z=100 if quick else 1000)
    sum_budget = Budget(max_depth=25, max_z=10 ** 6 if quick else 10 ** 8)
    return [
        check_tree(params, tree_budget, perturb=perturb),
        check_geometry(params, 1000 if quick else 10000),
        check_relations(params, rel_budget),
        check_identity(params, sum_budget, 1000 if quick else 10000),
        check_cantor(params, depths=(5, 8) if quick else (5, 8, 11, 14),
                     n_branches=20 if quick else 100),
    ]
