from __future__ import annotations


class TdlabError(Exception):
    """Base class for all library errors."""

    exit_code = 5


class UsageError(TdlabError, ValueError):
    exit_code = 2


class ParseError(TdlabError, ValueError):
    exit_code = 2


class FieldMismatchError(TdlabError, ValueError):
    """Scalars from fields with different radicands were combined."""

    exit_code = 5


class FieldExtensionError(TdlabError, ValueError):
    """A computation needs a square root that does not exist in Q(sqrt(D))."""

    exit_code = 3


class KindError(TdlabError, ValueError):
    """An operation is not defined for the requested algebra kind."""

    exit_code = 5


class WeightError(TdlabError, ValueError):
    """The k-spectrum is not a single q^2 ladder, or U_0 is not one-dimensional."""

    exit_code = 5


class MultisetError(TdlabError, ValueError):
    exit_code = 5


class RealizationError(TdlabError, ValueError):
    exit_code = 5


class CapExceededError(TdlabError, ValueError):
    exit_code = 4


class InconclusiveError(TdlabError, RuntimeError):
    """The irreducibility oracle could not reach a proof within its budget."""

    exit_code = 6
