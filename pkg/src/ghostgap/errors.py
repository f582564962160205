"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations


class GhostGapError(Exception):
    exit_code = 1
    category = "error"


class ParseError(GhostGapError):
    """Config document is not well-formed JSON.

    ``line`` and ``field`` locate the problem when known.
    """

    exit_code = 2
    category = "parse"

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class ValidationError(GhostGapError):
    exit_code = 3
    category = "validation"

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class DomainMismatch(ValidationError):
    """Classes, routers or regions combined over different domains."""

    category = "domain-mismatch"


class EmptyFamily(ValidationError):
    category = "empty-family"


class EmptyFiberProduct(ValidationError):
    category = "empty-fiber-product"


class CapExceeded(GhostGapError):
    exit_code = 4
    category = "cap"


class BudgetExceeded(GhostGapError):
    """A combinatorial scan ran out of budget.

    ``lower_bound`` is the best certified partial answer (e.g. the largest
    shattered size found so far).
    """

    exit_code = 4
    category = "budget"

    def __init__(self, message: str, lower_bound: int | None = None):
        self.lower_bound = lower_bound
        super().__init__(message)


class InvariantViolation(GhostGapError):
    """A mathematical invariant failed at runtime. Always a bug."""

    exit_code = 5
    category = "invariant"
