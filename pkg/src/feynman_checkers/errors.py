"""Exception hierarchy shared by the engines and the CLI."""


class CheckersError(Exception):
    """Base class for all errors raised by this package."""


class UnreachableSiteError(CheckersError, ValueError):
    """A site has the wrong parity or lies outside the light cone."""


class ResourceLimitError(CheckersError):
    """A requested time exceeds the configured computation limit."""


class HypothesisViolation(CheckersError, ValueError):
    """Arguments fall outside the range where a statement holds (e.g. zero mass)."""


class InvalidBypassSet(CheckersError, ValueError):
    """A bypass set is malformed or contains the origin."""


class NonBlockingSetError(CheckersError, ValueError):
    """Conservation was requested for a set that some infinite path avoids."""
