class DomainError(ValueError):
    """An argument violates an operation's precondition."""


class ResourceError(RuntimeError):
    """A search exceeded its configured exploration cap or time budget."""


class ParseError(ValueError):
    """Malformed text input."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no
