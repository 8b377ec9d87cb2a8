"""Exception types raised by the library."""


class RejectedInput(ValueError):
    """An argument violates an operation's precondition."""


class RejectedQuery(RuntimeError):
    """A query was issued against a state that cannot answer it."""


class ParseError(RejectedInput):
    """A stream record could not be parsed."""

    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class SnapshotError(RejectedInput):
    """A snapshot payload is corrupt or has an unsupported version."""
