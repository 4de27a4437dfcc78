"""Parameter validation, moves, and tree enumeration."""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction

import mpmath as mp
import pytest

from excision.errors import (
    BudgetZero,
    EquationViolated,
    NoRealRoot,
    NuNotAtRoot,
    OrderingViolated,
)
from excision.fricke import (
    Budget,
    adjusted_residual,
    apply_move,
    apply_move_matrices,
    enumerate_tree,
    minimal_triple,
    root_node,
    solve_c,
    validate_params,
    walk_path,
)
from excision.moebius import Mat2, fixed_point, generator_matrices

F = Fraction
MODULAR = validate_params(3, 3, 3)


def brute_force_max_entries(a: int, cap: int) -> set[int]:
    """All z = max(x,y,z) <= cap with x^2+y^2+z^2 = a x y z, by enumeration."""
    out = set()
    for x in range(1, cap + 1):
        for y in range(x, cap + 1):
            disc = a * a * x * x * y * y - 4 * (x * x + y * y)
            if disc < 0:
                continue
            root = math.isqrt(disc)
            if root * root != disc:
                continue
            for sgn in (root, -root):
                num = a * x * y + sgn
                if num % 2 == 0 and y <= num // 2 <= cap:
                    out.add(num // 2)
    return out


def test_validate_modular():
    p = validate_params(3, 3, 3)
    assert p.exact
    assert (p.a, p.b, p.c) == (3, 3, 3)


def test_validate_equation_violated():
    with pytest.raises(EquationViolated):
        validate_params(2, 2, 2)


def test_validate_ordering_violated():
    # 9 + 9 + 36 = 54 = 3*3*6 holds, but 6 >= 9/2
    with pytest.raises(OrderingViolated):
        validate_params(3, 3, 6)


def test_solve_c_examples():
    assert solve_c(3, 3) == 3
    c = solve_c(3, 6)
    assert c == 3
    with pytest.raises(OrderingViolated):
        validate_params(3, 6, c)
    with pytest.raises(NoRealRoot):
        solve_c("2.5", "2.5")


def test_solve_c_float_fallback():
    c = solve_c("2.5", "3.4")
    assert isinstance(c, mp.mpf)
    params = validate_params("2.5", "3.4", c, mode="float")
    assert not params.exact


def test_minimal_triple_matches_fixed_point_heights():
    for params in (MODULAR, validate_params("9/4", "9/2", "9/2")):
        t0, t1, t2 = generator_matrices(params)
        x, y, z = minimal_triple(params)
        # inverse heights of the fixed points of (T2, T1, T0)
        assert 1 / fixed_point(t2, params.ctx).y == x
        assert 1 / fixed_point(t1, params.ctx).y == y
        assert 1 / fixed_point(t0, params.ctx).y == z
        assert adjusted_residual((x, y, z), params) == 0


def test_minimal_triple_is_minimal_by_brute_force():
    # sum-minimal among integer solutions with z <= 1000
    sols = brute_force_max_entries(3, 1000)
    assert min(sols) == 1
    assert minimal_triple(MODULAR) == (1, 1, 1)


def test_apply_move_examples():
    assert apply_move((F(1), F(1), F(1)), "R", MODULAR) == (1, 1, 2)
    assert apply_move((F(1), F(2), F(5)), "L", MODULAR) == (1, 5, 13)
    assert 13 in brute_force_max_entries(3, 13)
    assert apply_move((F(1), F(1), F(1)), "N", MODULAR) == (1, 1, 2)


def test_apply_move_residual_preserved():
    t = (F(1), F(1), F(1))
    for moves in ("L", "R"):
        cur = t
        for _ in range(6):
            cur = apply_move(cur, moves, MODULAR)
            assert adjusted_residual(cur, MODULAR) == 0
            assert cur[2] == max(cur)


def test_nu_only_at_minimal_triple():
    with pytest.raises(NuNotAtRoot):
        apply_move((F(1), F(1), F(2)), "N", MODULAR)


def test_nu_numeric_form_fixed_by_matrix_oracle():
    # on a surface with a != b the involution orientation is observable:
    # new inverse heights are (y, x, a*x*y - z), read off the matrices
    params = validate_params("9/4", "9/2", "9/2")
    node = root_node(params)
    assert node.triple == (1, 2, 2)
    nu = apply_move_matrices(node, "N", params)
    g, f, e = nu.G, nu.F, nu.E
    assert (abs(g.c), abs(f.c), abs(e.c)) == (2, 1, F(5, 2))
    assert nu.triple == (2, 1, F(5, 2))


def test_nu_matrix_entry_modular():
    # FEF = T1 T0 T1 by explicit multiplication
    node = root_node(MODULAR)
    t0, t1, t2 = node.mats
    fef = t1 * t0 * t1
    assert fef == Mat2(F(-3), F(5), F(-2), F(3))
    nu = apply_move_matrices(node, "N", MODULAR)
    # stored with the sign normalized to a positive lower-left entry
    assert nu.E == -fef
    assert nu.E.c > 0


def test_move_matrices_product_relation():
    s3 = Mat2.translation(F(3))
    node = root_node(MODULAR)
    for move in ("L", "R", "N"):
        child = apply_move_matrices(node, move, MODULAR)
        assert child.G * child.F * child.E == s3
        assert abs(child.E.c) == child.triple[2]


def test_matrix_triple_consistency_along_path():
    node = walk_path(MODULAR, "mLRLR")
    x, y, z = node.triple
    assert (abs(node.G.c), abs(node.F.c), abs(node.E.c)) == (x, y, z)


def test_vieta_involution_squares_to_identity():
    t = minimal_triple(MODULAR)
    nu = apply_move(t, "N", MODULAR)
    # applying the same flip to the image returns the minimal triple
    back = (nu[1], nu[0], MODULAR.a * nu[0] * nu[1] - nu[2])
    assert back == t


def test_enumerate_depth_one():
    zs = [int(n.z) for n in enumerate_tree(MODULAR, Budget(max_depth=1))]
    assert zs == [1, 2, 2, 2]


def test_enumerate_max_z_30_multiset():
    nodes = list(enumerate_tree(MODULAR, Budget(max_z=30)))
    counts = Counter(int(n.z) for n in nodes)
    assert counts == {1: 1, 2: 3, 5: 6, 13: 6, 29: 6}
    assert set(counts) <= brute_force_max_entries(3, 30)


def test_enumerate_budget_zero():
    with pytest.raises(BudgetZero):
        list(enumerate_tree(MODULAR, Budget(max_nodes=0)))
    with pytest.raises(BudgetZero):
        list(enumerate_tree(MODULAR, Budget()))


def test_enumerate_deterministic_and_sorted():
    a = [(str(n.z), n.path) for n in enumerate_tree(MODULAR, Budget(max_z=200))]
    b = [(str(n.z), n.path) for n in enumerate_tree(MODULAR, Budget(max_z=200))]
    assert a == b
    zs = [int(z) for z, _ in a]
    assert zs == sorted(zs)
    # duplicate triples stay distinct nodes
    paths = [p for _, p in a]
    assert len(paths) == len(set(paths))


def test_enumerate_markoff_oracle_1000():
    counts = Counter(int(n.z) for n in enumerate_tree(MODULAR, Budget(max_z=1000)))
    expected = brute_force_max_entries(3, 1000)
    assert set(counts) == expected
    assert 89 in expected  # (1, 34, 89) is a solution
    for z, mult in counts.items():
        assert mult == {1: 1, 2: 3}.get(z, 6)


def test_depth_vs_level():
    nodes = {n.path: n for n in enumerate_tree(MODULAR, Budget(max_depth=2))}
    assert nodes["m"].depth == 0 and nodes["m"].level == 0
    assert nodes["n"].depth == 1 and nodes["n"].level == 0
    assert nodes["mL"].depth == 1 and nodes["mL"].level == 1
    assert nodes["nL"].depth == 2 and nodes["nL"].level == 1


def test_max_nodes_budget():
    nodes = list(enumerate_tree(MODULAR, Budget(max_nodes=7)))
    assert len(nodes) == 7
    assert [n.path for n in nodes[:4]] == ["m", "mL", "mR", "n"]


def test_float_mode_tree_consistency():
    params = validate_params(3, 3, 3, mode="float", prec=192)
    nodes = list(enumerate_tree(params, Budget(max_z=50)))
    with params.ctx.workprec():
        for node in nodes:
            resid = adjusted_residual(node.triple, params)
            rhs = params.a * node.triple[0] * node.triple[1] * node.triple[2]
            assert abs(resid) <= mp.mpf(2) ** (16 - params.ctx.prec) * abs(rhs)
