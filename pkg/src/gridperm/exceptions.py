"""Exception types shared by the library and the CLI."""


class ResourceLimitError(RuntimeError):
    """A configured guard (state budget, oracle size cap) was exceeded."""


class FormatError(ValueError):
    """Malformed input text, with an optional 1-based line and column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
