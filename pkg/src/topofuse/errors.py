"""Exception hierarchy.

Everything raised on purpose derives from :class:`TopofuseError`, so callers
(the CLI in particular) can separate user-input problems from internal bugs.
"""

from __future__ import annotations


class TopofuseError(Exception):
    """Base class for all library errors."""


class StructuralError(TopofuseError, ValueError):
    """A graph violates a structural rule (dangling arc, self-loop, ...)."""


class CycleError(StructuralError):
    """A directed cycle was found where a DAG is required."""

    def __init__(self, cycle: list[str], message: str | None = None):
        self.cycle = list(cycle)
        super().__init__(message or "directed cycle: " + " -> ".join(self.cycle))


class UnknownNodeError(TopofuseError, LookupError):
    def __init__(self, node: str):
        self.node = node
        super().__init__(f"unknown node {node!r}")

    def __str__(self) -> str:
        return self.args[0]


class ArcNotFoundError(TopofuseError, LookupError):
    def __init__(self, arc: tuple[str, str]):
        self.arc = tuple(arc)
        super().__init__(f"arc {arc[0]}->{arc[1]} not in graph")

    def __str__(self) -> str:
        return self.args[0]


class ProjectionError(StructuralError):
    pass


class InvalidReversalError(StructuralError):
    """Reversing the arc would close a cycle through an alternative path."""


class PreconditionError(TopofuseError, ValueError):
    pass


class AlgorithmInvariantError(TopofuseError, RuntimeError):
    """An internal invariant of the fusion procedure was breached.

    This always indicates a bug, never bad input.  ``trace`` holds the events
    recorded up to the point of failure.
    """

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class ResourceError(TopofuseError, MemoryError):
    pass


class InconsistentEvidenceError(TopofuseError, ValueError):
    pass


class SchemaError(TopofuseError, ValueError):
    """Variables shared between nets disagree on their state labels."""


class TraceMismatchError(TopofuseError, ValueError):
    pass


class ParseError(TopofuseError, ValueError):
    def __init__(self, message: str, where: str | None = None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


class ValidationError(TopofuseError, ValueError):
    def __init__(self, message: str, where: str | None = None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)
