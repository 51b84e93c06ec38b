"""Exception hierarchy shared by the parser, compiler, evaluator and CLI."""

from __future__ import annotations


class GqeError(Exception):
    """Base class for every error raised by this package."""


class CypherSyntaxError(GqeError):
    """Raised when query text does not match the supported grammar."""

    def __init__(self, message: str, line: int, column: int, offset: int = 0):
        self.message = message
        self.line = line
        self.column = column
        self.offset = offset
        super().__init__(f"{message} at line {line}, column {column}")


class StructureError(CypherSyntaxError):
    """Clauses are individually valid but appear in an illegal order."""


class SemanticError(GqeError):
    """A well-formed query that cannot be compiled."""


class SchemaError(SemanticError):
    """An algebra tree whose schemas do not line up."""


class EvaluationError(GqeError):
    """Runtime type error while evaluating a plan."""


class GraphFormatError(GqeError):
    """Malformed Graph-JSON input."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} at line {line}, column {column}"
        super().__init__(message)


class UnknownElementError(GqeError, KeyError):
    """Lookup of a vertex or edge id that is not in the graph."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown element"
