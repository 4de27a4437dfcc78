"""Numeric kernel: exact rationals, quadratic surds, and p-bit reals.

Two computation modes share one code path:

  * exact mode  -- values are ``fractions.Fraction``; field arithmetic is
    lossless, so group relations can be tested bit-for-bit.  Square roots
    leave the rationals; they are carried as ``Surd`` values r + s*sqrt(q)
    which still compare exactly (sign determination by repeated squaring).
  * float mode  -- values are ``mpmath.mpf`` at a fixed precision p
    (default 256 bits); every public operation runs under ``workprec(p)``
    so results do not depend on the ambient mpmath state.

z-entries grow doubly exponentially along tree branches, which is why
hardware floats are never used for anything that feeds back into the
computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .errors import DomainError

Rational = (int, Fraction)


def _isqrt_exact(n: int) -> int | None:
    r = math.isqrt(n)
    return r if r * r == n else None


def exact_sqrt(q: Fraction) -> Fraction | None:
    """Square root of a nonnegative rational, or None if irrational."""
    if q < 0:
        raise DomainError("square root of a negative rational")
    rn = _isqrt_exact(q.numerator)
    if rn is None:
        return None
    rd = _isqrt_exact(q.denominator)
    if rd is None:
        return None
    return Fraction(rn, rd)


def _sign(x) -> int:
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def _sign_one_radical(a: Fraction, b: Fraction, p: Fraction) -> int:
    # sign of a + b*sqrt(p), p >= 0 rational
    if b == 0 or p == 0:
        return _sign(a)
    if a == 0:
        return _sign(b)
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    # mixed signs: compare a^2 with b^2 p
    return _sign(a) * _sign(a * a - b * b * p)


def _sign_two_radicals(a: Fraction, b: Fraction, p: Fraction,
                       c: Fraction, q: Fraction) -> int:
    # sign of a + b*sqrt(p) + c*sqrt(q), p,q >= 0 rational
    if b == 0 or p == 0:
        return _sign_one_radical(a, c, q)
    if c == 0 or q == 0:
        return _sign_one_radical(a, b, p)
    # sign of the radical part L = b*sqrt(p) + c*sqrt(q)
    if b > 0 and c > 0:
        s_l = 1
    elif b < 0 and c < 0:
        s_l = -1
    else:
        s_l = _sign(b) * _sign(b * b * p - c * c * q)
    if a == 0:
        return s_l
    if s_l == 0:
        return _sign(a)
    if a > 0 and s_l > 0:
        return 1
    if a < 0 and s_l < 0:
        return -1
    # |L| versus |a|: square L once, leaving a single radical sqrt(p*q)
    mag = _sign_one_radical(b * b * p + c * c * q - a * a, 2 * b * c, p * q)
    if mag == 0:
        return 0
    return s_l if mag > 0 else _sign(a)


class Surd:
    """Exact value r + s*sqrt(q) with rational r, s and rational q >= 0.

    Perfect-square radicands collapse to plain rationals on construction.
    Sums/products are defined with rationals and with surds sharing the same
    radicand; comparisons work across *different* radicands (two-radical
    sign test), which is what interval disjointness checks need.
    """

    __slots__ = ("r", "s", "q")
    __hash__ = None  # equal values can have distinct representations

    def __init__(self, r, s=0, q=0):
        r = Fraction(r)
        s = Fraction(s)
        q = Fraction(q)
        if q < 0:
            raise DomainError("negative radicand")
        if s == 0:
            q = Fraction(0)
        elif q == 0:
            s = Fraction(0)
        else:
            root = exact_sqrt(q)
            if root is not None:
                r, s, q = r + s * root, Fraction(0), Fraction(0)
        self.r, self.s, self.q = r, s, q

    # -- constructors ----------------------------------------------------
    @staticmethod
    def sqrt(q) -> "Surd":
        return Surd(0, 1, Fraction(q))

    @property
    def is_rational(self) -> bool:
        return self.s == 0

    def rational_value(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("surd is irrational")
        return self.r

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Surd):
            return other
        if isinstance(other, Rational):
            return Surd(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.s == 0 or o.s == 0 or self.q == o.q:
            q = self.q if self.s else o.q
            return Surd(self.r + o.r, self.s + o.s, q)
        raise TypeError("cannot add surds over distinct radicands")

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.r, -self.s, self.q)

    def __abs__(self):
        return -self if self._cmp(0) < 0 else self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.s == 0 or o.s == 0 or self.q == o.q:
            q = self.q if self.s else o.q
            rad_sq = self.s * o.s * q  # sqrt(q)^2 term
            return Surd(self.r * o.r + rad_sq, self.r * o.s + self.s * o.r, q)
        raise TypeError("cannot multiply surds over distinct radicands")

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        norm = o.r * o.r - o.s * o.s * o.q
        if norm == 0:
            raise ZeroDivisionError("division by zero surd")
        conj = Surd(o.r / norm, -o.s / norm, o.q)
        return self * conj

    def __rtruediv__(self, other):
        return Surd(other) / self

    # -- exact order ------------------------------------------------------
    def _cmp(self, other) -> int:
        o = self._coerce(other)
        if o is None:
            raise TypeError(f"cannot compare Surd with {type(other).__name__}")
        return _sign_two_radicals(self.r - o.r, self.s, self.q, -o.s, o.q)

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except TypeError:
            return NotImplemented

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    # -- conversion ---------------------------------------------------------
    def to_mpf(self, prec: int) -> mp.mpf:
        with mp.workprec(prec):
            val = fraction_to_mpf(self.r, prec)
            if self.s:
                val += fraction_to_mpf(self.s, prec) * mp.sqrt(fraction_to_mpf(self.q, prec))
            return +val

    def __float__(self):
        return float(self.to_mpf(64))

    def __repr__(self):
        if self.s == 0:
            return f"Surd({self.r})"
        return f"Surd({self.r} + {self.s}*sqrt({self.q}))"


def fraction_to_mpf(x, prec: int) -> mp.mpf:
    """Convert int/Fraction/mpf/Surd to mpf with one rounding at `prec` bits."""
    with mp.workprec(prec):
        if isinstance(x, mp.mpf):
            return +x
        if isinstance(x, int):
            return mp.mpf(x)
        if isinstance(x, Surd):
            return x.to_mpf(prec)
        if isinstance(x, Fraction):
            if x.denominator == 1:
                return mp.mpf(x.numerator)
            return mp.mpf(x.numerator) / mp.mpf(x.denominator)
        if isinstance(x, float):
            return mp.mpf(x)
        if isinstance(x, str):
            return mp.mpf(x)
    raise TypeError(f"cannot convert {type(x).__name__} to mpf")


@dataclass(frozen=True)
class Context:
    """Numeric mode of a run: exact rationals or p-bit reals.

    `prec` is used even in exact mode, for the quantities that are
    irreducibly irrational (widths, heights, accumulated sums).
    """

    exact: bool = True
    prec: int = 256

    def workprec(self):
        return mp.workprec(self.prec)

    def mpf(self, x) -> mp.mpf:
        return fraction_to_mpf(x, self.prec)

    def scalar(self, x):
        """Canonical scalar for this context (Fraction or mpf)."""
        if self.exact:
            if isinstance(x, Fraction):
                return x
            if isinstance(x, int):
                return Fraction(x)
            if isinstance(x, str):
                return Fraction(x)
            if isinstance(x, float):
                return Fraction(x)
            if isinstance(x, Surd) and x.is_rational:
                return x.rational_value()
            raise TypeError(f"value {x!r} is not exactly representable")
        return self.mpf(x)

    def sqrt(self, x):
        """Scalar square root: Surd (exact mode) or mpf."""
        if self.exact and isinstance(x, Rational + (Surd,)):
            if isinstance(x, Surd):
                if not x.is_rational:
                    raise TypeError("nested radicals are not supported")
                x = x.rational_value()
            q = Fraction(x)
            if q < 0:
                raise DomainError("square root of a negative value")
            root = exact_sqrt(q)
            return root if root is not None else Surd.sqrt(q)
        with self.workprec():
            return mp.sqrt(self.mpf(x))

    # tolerance ladders used by the geometry predicates
    def eq_tol(self) -> mp.mpf:
        """Relative tolerance for equation residuals, 2^(8-p)."""
        return mp.mpf(2) ** (8 - self.prec)

    def boundary_tol(self) -> mp.mpf:
        """Relative tolerance for boundary classification, 2^(16-p)."""
        return mp.mpf(2) ** (16 - self.prec)


def rationalize(x) -> Fraction | None:
    """Best-effort exact reading of a user-facing number; None if impossible."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError):
            return None
    if isinstance(x, float):
        return Fraction(x)
    return None


class CompensatedSum:
    """Neumaier-compensated accumulator over mpf at a fixed precision.

    Deterministic for a fixed addition order; the final value is rounded
    once when read.
    """

    __slots__ = ("prec", "_s", "_c")

    def __init__(self, prec: int):
        self.prec = prec
        with mp.workprec(prec):
            self._s = mp.mpf(0)
            self._c = mp.mpf(0)

    def add(self, x) -> None:
        with mp.workprec(self.prec):
            x = fraction_to_mpf(x, self.prec)
            t = self._s + x
            if abs(self._s) >= abs(x):
                self._c += (self._s - t) + x
            else:
                self._c += (x - t) + self._s
            self._s = t

    def value(self) -> mp.mpf:
        with mp.workprec(self.prec):
            return self._s + self._c


def prec_to_dps(prec: int) -> int:
    return int(prec / 3.3219280948873626) + 3


def scalar_str(x, prec: int = 256) -> str:
    """Serialize a scalar as a decimal string at full working precision.

    Integers print exactly; non-integer rationals print as 'num/den'
    (their only finite full-precision decimal form); mpf values print with
    enough digits to round-trip at `prec` bits.
    """
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, Surd):
        x = x.to_mpf(prec)
    if isinstance(x, mp.mpf):
        return mp.nstr(x, prec_to_dps(prec), strip_zeros=True)
    if isinstance(x, float):
        return repr(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def parse_scalar(s: str, ctx: Context):
    """Inverse of scalar_str for the context's canonical scalars."""
    if ctx.exact:
        return Fraction(s)
    with ctx.workprec():
        return mp.mpf(s)
