"""Shared exception types for the gidsolve package."""


class GidError(Exception):
    """Base class for all gidsolve errors."""


class ParseError(GidError):
    """Malformed profile, instance, or config text."""


class RuleNotApplicable(GidError):
    """Rule and profile kind do not fit together."""


class QuotaConstraintViolated(GidError):
    """Consent quotas violate s + t <= n + 2."""


class IndexOutOfRange(GidError):
    """Individual index outside 0..n-1."""


class KindMismatch(GidError):
    """Solution kind does not match the problem family."""


class WitnessOutOfDomain(GidError):
    """Solution touches individuals or entries outside its legal domain."""


class PreconditionViolated(GidError):
    """Instance falls outside a specialized algorithm's precondition."""


class InstanceTooLarge(GidError):
    """Enumeration or branching would exceed the configured node limit."""


class NoRExtension(GidError):
    """Partial profile admits no extension with exactly r positives per row."""


class InvalidR(GidError):
    """r outside 1..n."""


class WrongKind(GidError):
    """Profile kind not accepted by this operation."""
