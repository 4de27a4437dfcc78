"""Trace parameters, adjusted triples, and the two-rooted move tree.

A once-punctured hyperbolic torus quotient of signature (0; 2,2,2, inf) is
pinned down by positive reals (a, b, c) with

    a^2 + b^2 + c^2 = a*b*c,      2 < a <= b <= c < a*b/2,

and comes with order-two generators (T0, T1, T2) whose product T2*T1*T0 is
the translation z -> z + a.  Inverse heights (x, y, z) of the fixed points
of a generating triple (E, F, G) satisfy the adjusted equation

    x^2 + y^2 + z^2 = a*x*y*z        (Markoff's equation when a = 3),

with z = max{x, y, z}.  Three moves act on generating triples:

    L ("lambda"):  (E, F, G) -> (EFE, E, G)          (x, y, z) -> (x, z, a*x*z - y)
    R ("rho"):     (E, F, G) -> (FGF, F, S^a E S^-a) (x, y, z) -> (z, y, a*y*z - x)
    N ("nu"):      (E, F, G) -> (FEF, G, S^a F S^-a) (x, y, z) -> (y, x, a*x*y - z)

L and R generate an infinite binary subtree below any triple; N is a single
involution edge joining the subtree of the minimal triple to a second
subtree.  The numeric form of N above is forced by the matrices: the new
first element is FEF, whose inverse fixed-point height is a*x*y - z, while
the other two slots inherit y and x in swapped order.

Every z-entry strictly increases along L/R edges (and along the N edge from
the minimal triple), so a best-first queue enumerates the whole two-rooted
tree in globally ascending z order with a deterministic tie-break.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

import mpmath as mp

from .errors import (
    BudgetZero,
    EquationViolated,
    NoRealRoot,
    NuNotAtRoot,
    OrderingViolated,
)
from .moebius import Mat2, generator_matrices
from .scalars import Context, exact_sqrt, rationalize

MOVES = ("L", "R", "N")
ROOT_PATH = "m"
NU_ROOT_PATH = "n"


@dataclass(frozen=True)
class FrickeParams:
    """Validated trace parameters plus the numeric context they live in."""

    a: object
    b: object
    c: object
    ctx: Context

    @property
    def exact(self) -> bool:
        return self.ctx.exact

    def translation_matrix(self) -> Mat2:
        return Mat2.translation(self.a)


def _make_context(a, b, c, mode: str, prec: int) -> Context:
    if mode == "exact":
        return Context(exact=True, prec=prec)
    if mode == "float":
        return Context(exact=False, prec=prec)
    if mode != "auto":
        raise ValueError(f"unknown mode {mode!r}")
    exact = all(rationalize(v) is not None for v in (a, b, c))
    return Context(exact=exact, prec=prec)


def validate_params(a, b, c, *, mode: str = "auto", prec: int = 256) -> FrickeParams:
    """Check the trace equation and the ordering 2 < a <= b <= c < ab/2.

    Raises EquationViolated when a^2+b^2+c^2 != abc (to relative tolerance
    2^(8-p) in float mode) and OrderingViolated when the chain fails.
    """
    ctx = _make_context(a, b, c, mode, prec)
    a, b, c = ctx.scalar(a), ctx.scalar(b), ctx.scalar(c)
    if ctx.exact:
        residual = a * a + b * b + c * c - a * b * c
        if residual != 0:
            raise EquationViolated(f"a^2+b^2+c^2 - abc = {residual}")
    else:
        with ctx.workprec():
            residual = a * a + b * b + c * c - a * b * c
            if abs(residual) > ctx.eq_tol() * abs(a * b * c):
                raise EquationViolated(f"relative residual {mp.nstr(residual / (a * b * c), 6)}")
    if not (2 < a and a <= b and b <= c and c < a * b / 2):
        raise OrderingViolated(f"need 2 < a <= b <= c < ab/2, got ({a}, {b}, {c})")
    return FrickeParams(a, b, c, ctx)


def solve_c(a, b, *, mode: str = "auto", prec: int = 256):
    """Smaller root c = (ab - sqrt(a^2 b^2 - 4a^2 - 4b^2))/2 of the trace
    equation, the one compatible with c < ab/2.

    Exactness survives only when the discriminant is a rational square;
    otherwise the result is a p-bit real.  Raises NoRealRoot for negative
    discriminants.  The caller still has to run validate_params.
    """
    ar, br = rationalize(a), rationalize(b)
    if mode in ("auto", "exact") and ar is not None and br is not None:
        disc = ar * ar * br * br - 4 * ar * ar - 4 * br * br
        if disc < 0:
            raise NoRealRoot(f"discriminant {disc} < 0")
        root = exact_sqrt(disc)
        if root is not None:
            return (ar * br - root) / 2
        if mode == "exact":
            raise NoRealRoot(f"discriminant {disc} is not a rational square; "
                             "use float mode")
    ctx = Context(exact=False, prec=prec)
    with ctx.workprec():
        af, bf = ctx.mpf(a), ctx.mpf(b)
        disc = af * af * bf * bf - 4 * af * af - 4 * bf * bf
        if disc < 0:
            raise NoRealRoot(f"discriminant {mp.nstr(disc, 8)} < 0")
        return (af * bf - mp.sqrt(disc)) / 2


def minimal_triple(params: FrickeParams):
    """(1, b/a, c/a): inverse fixed-point heights of (T2, T1, T0).

    The unique sum-minimal positive solution of the adjusted equation.
    """
    one = params.ctx.scalar(1)
    if params.exact:
        return (one, params.b / params.a, params.c / params.a)
    with params.ctx.workprec():
        return (one, params.b / params.a, params.c / params.a)


def adjusted_residual(triple, params: FrickeParams):
    """x^2 + y^2 + z^2 - a*x*y*z."""
    x, y, z = triple
    if params.exact:
        return x * x + y * y + z * z - params.a * x * y * z
    with params.ctx.workprec():
        return x * x + y * y + z * z - params.a * x * y * z


def _triples_equal(t1, t2, params) -> bool:
    if params.exact:
        return all(u == v for u, v in zip(t1, t2))
    with params.ctx.workprec():
        tol = params.ctx.eq_tol()
        return all(abs(params.ctx.mpf(u) - params.ctx.mpf(v)) <= tol * (1 + abs(params.ctx.mpf(v)))
                   for u, v in zip(t1, t2))


def apply_move(triple, move: str, params: FrickeParams):
    """One move on an adjusted triple; see the module docstring for the maps.

    N is only defined at the minimal triple (the tree has a single N edge);
    elsewhere it raises NuNotAtRoot.  For L and R the new last entry is the
    strict maximum of the child triple.
    """
    x, y, z = triple
    a = params.a
    def go():
        if move == "L":
            return (x, z, a * x * z - y)
        if move == "R":
            return (z, y, a * y * z - x)
        if move == "N":
            return (y, x, a * x * y - z)
        raise ValueError(f"unknown move {move!r}")

    if move == "N" and not _triples_equal(triple, minimal_triple(params), params):
        raise NuNotAtRoot(f"involution applied away from the minimal triple: {triple}")
    if params.exact:
        return go()
    with params.ctx.workprec():
        return go()


@dataclass(frozen=True)
class TreeNode:
    """One node of the two-rooted move tree.

    path    -- 'm' or 'n' root tag followed by 'L'/'R' moves
    triple  -- adjusted solution (x, y, z), z maximal
    mats    -- order-two elements (E, F, G), G*F*E = S^a, inverse
               fixed-point heights (z, y, x)
    depth   -- edges from the main root ('n' counts the involution edge)
    """

    path: str
    triple: tuple
    mats: tuple
    depth: int

    @property
    def level(self) -> int:
        """L/R moves from this node's own subtree root."""
        return len(self.path) - 1

    @property
    def z(self):
        return self.triple[2]

    @property
    def E(self) -> Mat2:
        return self.mats[0]

    @property
    def F(self) -> Mat2:
        return self.mats[1]

    @property
    def G(self) -> Mat2:
        return self.mats[2]


def root_node(params: FrickeParams) -> TreeNode:
    t0, t1, t2 = generator_matrices(params)
    return TreeNode(ROOT_PATH, minimal_triple(params), (t0, t1, t2), 0)


def apply_move_matrices(node: TreeNode, move: str, params: FrickeParams) -> TreeNode:
    """Child node under a move, on matrices and triple simultaneously.

    The new first element is sign-normalized to a positive lower-left
    entry, the representative for which the product relation G*F*E = S^a
    survives each move exactly.
    """
    if move == "N" and node.path != ROOT_PATH:
        raise NuNotAtRoot("the involution edge exists only at the minimal triple")
    e, f, g = node.mats
    a = params.a
    def build():
        if move == "L":
            return ((e * f * e).normalized_gamma_positive(), e, g), node.path + "L"
        if move == "R":
            return ((f * g * f).normalized_gamma_positive(), f,
                    e.conjugate_by_translation(a)), node.path + "R"
        if move == "N":
            return ((f * e * f).normalized_gamma_positive(), g,
                    f.conjugate_by_translation(a)), NU_ROOT_PATH
        raise ValueError(f"unknown move {move!r}")

    if params.exact:
        mats, path = build()
    else:
        with params.ctx.workprec():
            mats, path = build()
    triple = apply_move(node.triple, move, params)
    return TreeNode(path, triple, mats, node.depth + 1)


@dataclass(frozen=True)
class Budget:
    """Enumeration bounds; at least one must be finite.

    A node is emitted iff its own depth and z pass; children of rejected
    nodes are pruned, which is sound because z strictly increases along
    every tree edge.
    """

    max_depth: Optional[int] = None
    max_z: Optional[object] = None
    max_nodes: Optional[int] = None

    def validate(self) -> None:
        if self.max_depth is None and self.max_z is None and self.max_nodes is None:
            raise BudgetZero("no finite budget bound given")
        if self.max_nodes is not None and self.max_nodes <= 0:
            raise BudgetZero(f"max_nodes = {self.max_nodes}")
        if self.max_depth is not None and self.max_depth < 0:
            raise BudgetZero(f"max_depth = {self.max_depth}")

    def admits(self, node: TreeNode, params: FrickeParams) -> bool:
        if self.max_depth is not None and node.depth > self.max_depth:
            return False
        if self.max_z is not None:
            if params.exact:
                if node.z > self.max_z:
                    return False
            else:
                with params.ctx.workprec():
                    if params.ctx.mpf(node.z) > params.ctx.mpf(self.max_z):
                        return False
        return True


def _z_sort_key(node: TreeNode, params: FrickeParams):
    if params.exact:
        return node.z
    return params.ctx.mpf(node.z)


def enumerate_tree(params: FrickeParams, budget: Budget) -> Iterator[TreeNode]:
    """Best-first stream of tree nodes in ascending z.

    Ties break on the path string ('m' < 'mL' < 'mR' < 'n' < ...), so two
    runs with the same budget yield the identical node sequence.  The two
    duplicate-valued children of a root are distinct nodes on purpose: they
    index excision intervals at different positions.
    """
    budget.validate()
    heap = []
    counter = 0  # guards against comparing TreeNode values on key ties

    def push(node):
        nonlocal counter
        if budget.admits(node, params):
            heapq.heappush(heap, (_z_sort_key(node, params), node.path, counter, node))
            counter += 1

    root = root_node(params)
    push(root)
    push(apply_move_matrices(root, "N", params))
    emitted = 0
    while heap:
        _, _, _, node = heapq.heappop(heap)
        yield node
        emitted += 1
        if budget.max_nodes is not None and emitted >= budget.max_nodes:
            return
        push(apply_move_matrices(node, "L", params))
        push(apply_move_matrices(node, "R", params))


def walk_path(params: FrickeParams, path: str) -> TreeNode:
    """Node addressed by a path string like 'mLRL' or 'nRR'."""
    if not path or path[0] not in ("m", "n"):
        raise ValueError(f"path must start with 'm' or 'n': {path!r}")
    node = root_node(params)
    if path[0] == "n":
        node = apply_move_matrices(node, "N", params)
    for ch in path[1:]:
        if ch not in ("L", "R"):
            raise ValueError(f"bad move letter {ch!r} in {path!r}")
        node = apply_move_matrices(node, ch, params)
    return node
