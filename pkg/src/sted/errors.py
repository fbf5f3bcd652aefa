"""Exception hierarchy shared by every sted module."""

from __future__ import annotations


class StedError(Exception):
    """Base class for all library errors."""


class InputError(StedError, ValueError):
    """Bad user input (documents, specs, tables). Mapped to CLI exit code 2."""


class ParseError(InputError):
    def __init__(self, offset: int, message: str):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset
        self.message = message


class DepthExceeded(InputError):
    def __init__(self, limit: int):
        super().__init__(f"document nesting exceeds limit of {limit}")
        self.limit = limit


class EmptyName(InputError):
    pass


class NotALeaf(InputError):
    pass


class NonSquare(InputError):
    pass


class NonFinite(InputError):
    pass


class EmptySet(InputError):
    pass


class TooFew(InputError):
    pass


class InfeasibleSpec(InputError):
    pass


class NoEligibleKeys(InputError):
    pass


class NoEligibleValues(InputError):
    pass


class EmptyPool(InputError):
    pass


class UnknownKey(InputError):
    pass


class OverlappingGroups(InputError):
    pass


class ConfigError(InputError):
    pass


class ProviderError(StedError):
    """Embedding provider failure. Mapped to CLI exit code 4."""


class ProviderUnavailable(ProviderError):
    pass


class DimensionMismatch(ProviderError):
    pass


class PairComparisonError(StedError):
    """Wraps a failure while comparing outputs ``i`` and ``j`` of a set."""

    def __init__(self, i: int, j: int, cause: BaseException):
        super().__init__(f"comparison of outputs {i} and {j} failed: {cause}")
        self.i = i
        self.j = j
        self.cause = cause
