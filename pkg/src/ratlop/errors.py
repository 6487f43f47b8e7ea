"""Exception types shared across the package, each with a stable machine code."""

from __future__ import annotations


class RatlopError(Exception):
    """Base class; `code` is the machine-readable error family."""

    code = "validation"

    def __init__(self, message: str, details: object = None):
        super().__init__(message)
        self.details = details


class DomainError(RatlopError):
    """A precondition or invariant of an operation was violated."""

    code = "validation"


class ParseError(RatlopError):
    """Malformed input document or file; maps to exit code 2 in the CLI."""

    code = "validation"

    def __init__(self, message: str, details: object = None, line: int | None = None):
        super().__init__(message, details)
        self.line = line


class NotFoundError(RatlopError):
    code = "not_found"


class IntegrityError(RatlopError):
    """Stored scores disagree with recomputation from stored inputs."""

    code = "integrity"


class InfeasibleError(RatlopError):
    """The requested improvement target exceeds the reachable maximum."""

    code = "infeasible"


class ConflictError(RatlopError):
    """Optimistic-concurrency revision check failed."""

    code = "conflict"
