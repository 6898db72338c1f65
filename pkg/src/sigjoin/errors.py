"""Exception types raised by sigjoin."""


class SigJoinError(Exception):
    """Base class for all library errors."""


class UnsupportedFieldError(SigJoinError, ValueError):
    pass


class NotPrimitiveError(SigJoinError):
    pass


class StringTooLong(SigJoinError, ValueError):
    """The string has too many symbols for the detection guarantee to hold."""


class BaseMismatch(SigJoinError, ValueError):
    pass


class RelationError(SigJoinError):
    """Malformed relation data, schema or CSV input."""


class SchemaError(RelationError, ValueError):
    pass


class MissingColumn(RelationError, KeyError):
    def __init__(self, column: str, where: str = "header"):
        self.column = column
        super().__init__(f"column {column!r} missing from {where}")

    def __str__(self) -> str:
        return self.args[0]


class DuplicateHeader(RelationError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"duplicate header column {column!r}")


class TypeParseError(RelationError, ValueError):
    """A CSV cell does not parse as its declared type.

    ``row`` is the 1-based line number in the file (the header is row 1).
    """

    def __init__(self, row: int, column: str, value: str, type_name: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(
            f"row {row}, column {column!r}: cannot parse {value!r} as {type_name}")


class MissingKeyColumn(RelationError, KeyError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"join key column {column!r} not found or not string-typed")

    def __str__(self) -> str:
        return self.args[0]


class SpecMismatch(SigJoinError, ValueError):
    """A build table is probed with an incompatible join configuration."""


class ConfigError(SigJoinError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
