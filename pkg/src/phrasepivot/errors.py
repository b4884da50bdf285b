"""Exception types shared across the package."""


class PhrasePivotError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PhrasePivotError):
    """A domain object violates one of its invariants."""


class ConfigError(PhrasePivotError):
    """Inconsistent or incomplete configuration (flags, directions, strategies)."""


class ParseError(PhrasePivotError):
    """A text input does not conform to its declared format.

    Carries the 1-based line number and the input name when known, so CLI
    messages can point at the offending file location.
    """

    def __init__(self, reason: str, *, line: int | None = None, source: str | None = None):
        self.reason = reason
        self.line = line
        self.source = source
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.source is not None and self.line is not None:
            return f"{self.source}: line {self.line}: {self.reason}"
        if self.line is not None:
            return f"line {self.line}: {self.reason}"
        if self.source is not None:
            return f"{self.source}: {self.reason}"
        return self.reason
