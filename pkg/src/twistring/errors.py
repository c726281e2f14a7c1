"""Exception hierarchy. Exit-code classes mirror the CLI contract."""


class TwistringError(Exception):
    """Base class for all package errors."""

    exit_code = 2


class InputError(TwistringError):
    """Bad user-supplied data (malformed file, unknown id, invalid group)."""

    exit_code = 2


class BudgetError(TwistringError):
    """A configured size or search bound was exceeded."""

    exit_code = 3


class InternalInvariantViolation(TwistringError):
    """An internal consistency assertion failed; indicates a bug."""

    exit_code = 4


class GroupConstructionError(InputError):
    pass


class ActionNotHomomorphism(GroupConstructionError):
    pass


class NotACocycle(InputError):
    pass


class NotNormal(InputError):
    pass


class NotAbelian(InputError):
    pass


class NotCoprime(InputError):
    pass


class NotCyclic(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class UnknownId(InputError):
    pass


class RelationCheckFailed(InternalInvariantViolation):
    pass


class SizeBound(BudgetError):
    pass


class Timeout(BudgetError):
    pass


class SearchBudgetExceeded(BudgetError):
    pass


class NumericalDegeneracy(InternalInvariantViolation):
    """Eigenvalue separation failed for every retry seed."""


class RootMatchFailure(InternalInvariantViolation):
    """A central eigenvalue matched no root of unity within tolerance."""


class ParseError(InputError):
    """Group-definition file error with position info."""

    def __init__(self, message, path="<input>", line=None, col=None):
        self.path = path
        self.line = line
        self.col = col
        loc = path
        if line is not None:
            loc += f":{line}"
            if col is not None:
                loc += f":{col}"
        super().__init__(f"{loc}: {message}")
