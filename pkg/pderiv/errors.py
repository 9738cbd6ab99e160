"""
Error types.
Every failure raised by the engine and the oracle derives from MuRegexError.
"""

from typing import Optional


class MuRegexError(Exception):
    """Base class for all engine errors."""


class ExprSyntaxError(MuRegexError, ValueError):
    """Malformed expression text, reported with a 1-based position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class UnboundVariableError(MuRegexError, KeyError):
    """A variable has no entry in the environment it is looked up in."""

    def __init__(self, name: str, where: Optional[str] = None):
        detail = f" in {where}" if where else ""
        super().__init__(f"unbound variable {name}{detail}")
        self.name = name

    def __str__(self):
        return self.args[0]


class SubstitutionError(MuRegexError, ValueError):
    """A substitution is not order-closed or does not cover a free variable."""


class FragmentError(MuRegexError, ValueError):
    """A mu-operator or variable reached an operation on plain regular expressions."""


class CapExceededError(MuRegexError, RuntimeError):
    """A configured safety cap was hit."""
