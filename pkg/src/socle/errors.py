"""Exception hierarchy shared by the whole engine."""


class EngineError(Exception):
    """Base class for every error raised by the engine."""


class StructuralError(EngineError):
    """Malformed input: mismatched rings, ranks, or dimensions."""


class DomainError(EngineError):
    """Input outside the mathematical domain of the operation."""


class ResourceError(EngineError):
    """A configured search or size cap was exceeded."""


class ScriptError(EngineError):
    """Script syntax or name-resolution error, with source position."""

    def __init__(self, message, line, col, expected=()):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(sorted(expected))
