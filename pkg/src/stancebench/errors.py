"""Exception types shared across the toolkit."""


class StanceBenchError(Exception):
    """Base class for all toolkit errors."""


class ParseError(StanceBenchError):
    """A data file could not be parsed; carries the offending line number."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix += str(path)
        if line is not None:
            prefix += f":{line}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class ValidationError(StanceBenchError):
    """Input violated a documented contract (bad label, duplicate id, ...)."""


class ConfigError(StanceBenchError):
    """A run configuration referenced an unknown key or inconsistent values."""


class ShapeError(StanceBenchError):
    """Tensor shapes are incompatible for the requested operation."""
