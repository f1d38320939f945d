"""Exception types shared across the package."""

from __future__ import annotations


class HlbenchError(Exception):
    """Base class for all package-specific errors."""


class RangeError(HlbenchError):
    """A numeric parameter lies outside its admissible range."""


class NotFoundError(HlbenchError):
    """A requested node, builtin, or strategy does not exist."""


class ShapeError(HlbenchError):
    """Two objects that must share a dimension (depth, ground set, top level) do not."""


class TreeInvalidError(HlbenchError):
    """An operation requiring a valid level tree received an invalid one."""

    def __init__(self, message: str, violations: tuple = ()):
        super().__init__(message)
        self.violations = violations


class EmbeddingInvalidError(HlbenchError):
    """A tree embedding breaks one of its structural invariants."""

    def __init__(self, message: str, problems: tuple = ()):
        super().__init__(message)
        self.problems = problems


class ConstructionError(HlbenchError):
    """Inputs to a coloring construction are inconsistent (empty matchings, overlapping level sets)."""


class BudgetError(HlbenchError):
    """An enumeration would exceed the configured budget before starting."""


class GameProtocolError(HlbenchError):
    """A strategy produced an illegal move, or a replayed history is inconsistent."""

    def __init__(self, message: str, strategy: str = "", round_index: int = -1):
        super().__init__(message)
        self.strategy = strategy
        self.round_index = round_index


class MorphismDomainError(HlbenchError):
    """A finite map is not total on the ground set it is checked against."""


class ParseError(HlbenchError):
    """A text input does not conform to its format; carries a 1-based line number."""

    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line
