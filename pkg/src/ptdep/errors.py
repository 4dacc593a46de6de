"""Exception types shared across the package."""


class PtdepError(Exception):
    """Base class for all package-specific errors."""


class DegenerateSample(PtdepError):
    """A margin has no usable spread (all values identical)."""


class VarMismatch(PtdepError):
    """Two matrices do not carry the same variable names."""


class ParseError(PtdepError):
    """Malformed input file; carries line/column context when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)


class RaggedRows(ParseError):
    """A CSV row has a different number of cells than the header."""


class EmptyMatrix(ParseError):
    """A matrix file contains a header but no data rows."""
