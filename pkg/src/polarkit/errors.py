"""Exception types shared across the toolkit.

Every error raised on a contract violation derives from ``PolarkitError``,
so callers (and the CLI) can distinguish "the math check failed" from
"the input was malformed".
"""


class PolarkitError(Exception):
    """Base class for all toolkit errors."""


class NotHermitian(PolarkitError):
    """A matrix expected to be Hermitian (within tolerance) is not."""


class DimensionOverflow(PolarkitError):
    """Span closure exceeded the configured dimension cap.

    Usually a sign that the tolerance is too small for the conditioning of
    the generators, so round-off keeps producing "new" directions.
    """


class HypothesisViolated(PolarkitError):
    """A stated precondition of a theorem-level check does not hold."""


class CommutantViolation(PolarkitError):
    """An operator required to commute with an algebra does not."""


class NotSubalgebra(PolarkitError):
    """The candidate ideal is not contained in the ambient algebra."""


class RelationViolated(PolarkitError):
    """The defining relation aa* in C*(1, a*a) fails for the input."""


class ModelMismatch(PolarkitError):
    """Two graded elements (or an element and a model) disagree on the model."""


class SupportViolation(PolarkitError):
    """A graded coefficient is not supported under its range projection."""


class ModelNotGraded(PolarkitError):
    """The model does not satisfy the hypotheses the graded calculus needs."""


class ZeroElement(PolarkitError):
    """Norm estimation was asked for an element that realizes to zero."""


class BandwidthOverflow(PolarkitError):
    """Repeated graded squaring would exceed the bandwidth cap."""


class UnsupportedPhi(PolarkitError):
    """Symbolic rewriting was requested for a non-affine substitution map."""


class DimensionTooSmall(PolarkitError):
    """The model is too small to evaluate the requested word faithfully."""


class InvalidSpec(PolarkitError):
    """A model specification is inconsistent or out of the supported range."""


class ParseError(PolarkitError):
    """A JSON artifact or word literal could not be parsed."""


class ConfigError(PolarkitError):
    """A suite configuration is malformed."""
