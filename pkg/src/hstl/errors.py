"""Exception types shared across the package."""


class HstlError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(HstlError):
    """A value or combination of values violates a documented contract."""


class ParseError(HstlError):
    """A formula or file could not be parsed.

    ``position`` is the 0-based character offset of the offending token
    when known.
    """

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)
        self.position = position


class SuffixUndefinedError(HstlError):
    """Requested a trace suffix starting at or past the end of the trace.

    Distinct from producing an empty trace: suffixes of length zero do
    not exist, and callers rely on this signal for the next-step
    semantics at the final timestep.
    """
