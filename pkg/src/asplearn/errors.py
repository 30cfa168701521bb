"""Exception types shared across the package."""


class AspError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(AspError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__("%s (line %d, column %d)" % (message, line, column))
        self.message = message
        self.line = line
        self.column = column


class SafetyError(ParseError):
    """A rule uses a variable that no positive body literal binds."""


class GroundingError(AspError):
    """Raised when grounding exceeds its caps or meets a malformed value."""


class SpaceError(AspError):
    """Hypothesis-space enumeration produced an invalid or oversized space."""


class TaskError(AspError):
    """A learning task file is structurally invalid."""
