"""Shared exception types and default size caps."""

# Hard ceilings for exhaustive objects.  Larger requests fail loudly instead
# of silently degrading; all are overridable per call.
DEFAULT_FIELD_CAP = 1 << 26
DEFAULT_ENUM_CAP = 1 << 26
DEFAULT_GRID_CAP = 1 << 26


class CapExceeded(RuntimeError):
    """A requested field, grid or enumeration exceeds its configured cap."""


class ParseError(ValueError):
    """Malformed polynomial text or input file."""


class ChainContainmentError(ValueError):
    """A stratum chain fails the descending-containment check."""


class RankTooHigh(RuntimeError):
    """Recurrence rank exceeds what the supplied sequence can support."""
