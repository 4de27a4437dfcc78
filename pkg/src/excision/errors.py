"""Exception types shared across the package.

Every failure mode of the geometric and number-theoretic operations gets its
own class so callers (and the CLI exit-code mapping) can discriminate without
string matching.
"""


class ExcisionError(Exception):
    """Base class for all package errors."""


class EquationViolated(ExcisionError):
    """Trace parameters do not satisfy a^2 + b^2 + c^2 = a*b*c."""


class OrderingViolated(ExcisionError):
    """Trace parameters violate 2 < a <= b <= c < a*b/2."""


class NoRealRoot(ExcisionError):
    """Quadratic for c has negative discriminant."""


class NuNotAtRoot(ExcisionError):
    """The involution move is only defined at the minimal triple."""


class BudgetZero(ExcisionError):
    """Enumeration budget admits no nodes (or no finite bound was given)."""


class GammaZero(ExcisionError):
    """Matrix fixes infinity; fixed point / isometric circle undefined."""


class PoleOnCircle(ExcisionError):
    """Circle passes through the pole; its image is a vertical line."""


class NotHyperbolic(ExcisionError):
    """|trace| <= 2; the element has no axis."""


class VerticalAxis(ExcisionError):
    """Axis is a vertical line (a fixed point at infinity)."""


class VerticalLine(ExcisionError):
    """The two points are vertically aligned; no semicircle joins them."""


class SamePoint(ExcisionError):
    """Two coincident fixed points; the joining h-line is undefined."""


class DomainError(ExcisionError):
    """Argument outside the real domain of a height/width formula."""


class OverlapDetected(ExcisionError):
    """Two excision intervals overlap; indicates a normalization bug."""


class DegenerateScales(ExcisionError):
    """Box-counting needs at least two distinct positive scales."""


class BoundViolated(ExcisionError):
    """A node exceeded the proven growth bound; must never happen."""


class PrecisionExhausted(ExcisionError):
    """Working precision ceiling reached while following a branch."""


class EmptyScene(ExcisionError):
    """Render window is degenerate or selects nothing."""


class ConfigError(ExcisionError):
    """Bad CLI/config input."""
