"""Exception hierarchy.

Every error carries a short machine-readable ``category`` string; the CLI
prints it on failure so scripts can branch on it.
"""


class SatoError(Exception):
    category = "error"

    def __init__(self, message="", **details):
        super().__init__(message or self.category)
        self.details = details


class UnsupportedRing(SatoError):
    category = "unsupported-ring"


class RingMismatch(SatoError):
    category = "ring-mismatch"


class ZeroPrecision(SatoError):
    category = "zero-precision"


class JetOrderExceeded(SatoError):
    category = "jet-order-exceeded"


class IndeterminateOrder(SatoError):
    category = "indeterminate-order"


class NonUnitLeading(SatoError, ArithmeticError):
    category = "non-unit-leading"


class NonUnit(SatoError, ArithmeticError):
    category = "non-unit"


class DivisibilityViolation(SatoError):
    category = "divisibility-violation"


class NotMonic(SatoError):
    category = "not-monic"


class NonPositiveValuation(SatoError):
    category = "nonpositive-valuation"


class BadValuation(SatoError):
    category = "bad-valuation"


class ZeroN(SatoError):
    category = "zero-N"


class WrongOrder(SatoError):
    category = "wrong-order"


class NotMonicOrderZero(SatoError):
    category = "not-monic-order-0"


class NotBigCell(SatoError):
    category = "not-big-cell"


class NonCommuting(SatoError):
    category = "non-commuting"


class NotDifferential(SatoError):
    category = "not-differential"


class NoPositiveOrder(SatoError):
    category = "no-positive-order"


class StabilityViolation(SatoError):
    category = "stability-violation"


class WindowTooSmall(SatoError):
    category = "window-too-small"


class UnstableBound(SatoError):
    category = "unstable-bound"


class DepthTooSmall(SatoError):
    category = "depth-too-small"


class WrongShape(SatoError):
    category = "wrong-shape"


class ConsistencyError(SatoError):
    """Two routes that must agree did not."""

    category = "consistency"


class ParseError(SatoError):
    category = "syntax-error"

    def __init__(self, message, position=None):
        super().__init__(f"{message} at position {position}" if position is not None else message,
                         position=position)
        self.position = position


class UnknownSymbol(SatoError):
    category = "unknown-symbol"


ALL_CATEGORIES = sorted(
    {cls.category for cls in SatoError.__subclasses__()} | {SatoError.category}
)
