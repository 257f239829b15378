"""Exception hierarchy shared across the package."""


class NilmapError(Exception):
    """Base class for all library errors."""


class RingMismatchError(NilmapError, ValueError):
    """Operands live in different polynomial rings."""


class DimensionError(NilmapError, ValueError):
    """Shapes of maps, matrices or points do not agree."""


class PreconditionError(NilmapError, ValueError):
    """An input does not have the form an operation requires."""


class ModulusMismatchError(NilmapError, ValueError):
    """Extension scalars built over different relations lambda^d = c."""


class InvariantBreach(NilmapError, AssertionError):
    """An internal consistency check failed. Always a bug."""


class ParseError(NilmapError, ValueError):
    """Lexical or syntax error in a .pmap document."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
