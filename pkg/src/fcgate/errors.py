"""Exception hierarchy shared by every module.

The CLI maps these onto process exit codes, so each class carries the code
it should surface as.
"""

from __future__ import annotations


class FcgError(Exception):
    exit_code = 3


class ShapeError(FcgError, ValueError):
    """Operand dimensions are incompatible."""


class CapacityError(FcgError, ValueError):
    """A configured size cap would be exceeded."""


class ValidationError(FcgError, ValueError):
    """Input is well-formed but violates an invariant (e.g. non-unitary U)."""


class DomainError(FcgError, ValueError):
    """Argument outside the operation's domain (y out of range, empty marked set...)."""


class PredicateError(FcgError):
    exit_code = 2


class PredicateSyntaxError(PredicateError, SyntaxError):
    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.message = message
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)

    def __str__(self) -> str:
        return self.args[0]


class UnknownIdentifierError(PredicateError, NameError):
    def __init__(self, name: str, offset: int):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r} at offset {offset}; only 'x', 'true', 'false' are allowed")


class PredicateTypeError(PredicateError, TypeError):
    """Boolean operator applied to integers or vice versa."""


class SchemaError(FcgError, ValueError):
    exit_code = 5


class CircuitError(FcgError, ValueError):
    """A circuit step is inconsistent with the declared registers."""

    def __init__(self, step: int, reason: str):
        self.step = step
        self.reason = reason
        super().__init__(f"step {step}: {reason}")
