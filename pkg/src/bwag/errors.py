"""Shared exception types."""


class BwagError(Exception):
    """Base class for all library errors."""


class InvalidGraph(BwagError, ValueError):
    """A graph failed the structural invariants (see graph.validate)."""


class DomainViolation(BwagError, ValueError):
    """A weight or degree lies outside the admissible value domain."""


class RangeViolation(BwagError, ValueError):
    """An aggregate value lies outside the influence function's admissible range."""


class PolarityViolation(BwagError, ValueError):
    """A graph mixes attacks/supports where only one polarity is admissible."""


class LengthMismatch(BwagError, ValueError):
    """Row and degree vector sizes differ."""


class SingularSystem(BwagError, ArithmeticError):
    """The linear system for the closed-form solver has no usable pivot."""


class NonFiniteIteration(BwagError, ArithmeticError):
    """An iterate became non-finite; carries the iteration index."""

    def __init__(self, iteration: int, message: str | None = None):
        self.iteration = iteration
        super().__init__(message or f"non-finite iterate at iteration {iteration}")


class UnknownName(BwagError, KeyError):
    """Lookup of a builtin graph, semantics or influence by unknown name."""


class DocumentError(BwagError, ValueError):
    """A graph document violates the on-disk JSON schema."""
