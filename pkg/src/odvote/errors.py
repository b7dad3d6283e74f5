"""Exception hierarchy. The CLI maps each class to its own exit status."""


class OdvoteError(Exception):
    exit_code = 1


class StructuralError(OdvoteError, ValueError):
    """Malformed input: wrong lengths, empty vectors, broken nesting."""

    exit_code = 2


class RuleViolation(StructuralError):
    """A ballot outside the voting rule's allowed set."""


class AmbiguityError(OdvoteError, ValueError):
    """A weak order where the operation needs a unique resolution."""

    exit_code = 2


class DomainError(OdvoteError, ValueError):
    """Arguments outside a metric's domain (e.g. EMD on unequal totals)."""

    exit_code = 2


class ParseError(OdvoteError, ValueError):
    exit_code = 3

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class ConfigError(OdvoteError, ValueError):
    exit_code = 4


class CapacityError(OdvoteError, RuntimeError):
    """An enumeration would exceed its configured cap."""

    exit_code = 5

    def __init__(self, message, cap=None, reached=None):
        self.cap = cap
        self.reached = reached
        super().__init__(message)


class VerificationFailure(OdvoteError):
    exit_code = 6
