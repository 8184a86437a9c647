"""Exception types shared by the loaders, partitioners and analytics."""


class GraphLayoutError(Exception):
    """Base class for errors raised by this package."""


class GraphFormatError(GraphLayoutError, ValueError):
    """A graph, partition or ordering file could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(GraphLayoutError, ValueError):
    """Input is well formed but outside the operation's domain."""
