class FaconError(Exception):
    """Base class for every error raised by the analysis services."""


class UsageError(FaconError):
    """An operation was called outside its domain (wrong space, wrong length, zero vector...)."""


class GenericityError(FaconError):
    """Random parameters satisfying the genericity constraints could not be drawn."""


class ParseError(FaconError):
    """
    A mapping description could not be parsed.

    :param message: What went wrong.
    :param line: 1-based line of the offending token.
    :param column: 1-based column of the offending token.
    """

    def __init__(self, message: str, line: int = 1, column: int = 1) -> None:
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def diagnostic(self) -> str:
        return f"line {self.line}, column {self.column}: {self.message}"

    def __str__(self) -> str:
        return self.diagnostic()
