"""Exception hierarchy shared by every module."""


class CevianError(Exception):
    pass


class ValidationError(CevianError, ValueError):
    """Malformed input or a violated precondition."""


class ParseError(ValidationError):
    """Syntax error in a term, set, or scenario file.

    ``line`` and ``col`` are 1-based; ``col`` alone is used for one-line sources.
    """

    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}, col {col}: " if col is not None else f"line {line}: "
        elif col is not None:
            where = f"col {col}: "
        super().__init__(where + message)


class InconsistencyError(CevianError):
    """A mechanized theorem was contradicted by the data.

    This is never expected. ``counterexample`` holds a serializable description
    of the offending input so that the event can be reproduced.
    """

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample
