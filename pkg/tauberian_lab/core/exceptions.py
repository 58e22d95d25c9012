"""
Exception hierarchy shared by the core modules and the suites
"""
from typing import Optional


class TauberianLabError(Exception):
    """Base class for every error raised by tauberian_lab"""


class DomainError(TauberianLabError, ValueError):
    """Argument lies outside the mathematical domain of an operation"""


class ResourceLimitError(TauberianLabError):
    """Requested table exceeds the configured memory cap"""

    def __init__(self, requested: int, cap: int):
        self.requested = requested
        self.cap = cap
        super().__init__(f"Requested table limit {requested} exceeds the configured cap {cap}")


class ShapeMismatchError(TauberianLabError, ValueError):
    """Two arithmetic functions with different limits were combined"""


class RangeLimitError(TauberianLabError, IndexError):
    """A query reaches beyond the sieved range or the sampled domain"""

    def __init__(self, message: str, limit: Optional[float] = None):
        self.limit = limit
        if limit is not None:
            message = f"{message} (current limit: {limit})"
        super().__init__(message)


class PreconditionError(TauberianLabError, ValueError):
    """A documented precondition does not hold; the message names it"""

    def __init__(self, condition: str, detail: str = ""):
        self.condition = condition
        message = f"Precondition failed: {condition}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class UsageError(TauberianLabError, ValueError):
    """Unknown series kind, instance label or output format"""


class ConfigurationError(TauberianLabError, ValueError):
    """RunConfig values violate their invariants"""
