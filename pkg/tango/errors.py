from typing import Optional


class TangoError(Exception):
    """Base class for every error raised by the package."""


class ShapeError(TangoError, ValueError):
    pass


class UnknownOpError(TangoError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown op"


class NonFiniteError(TangoError, FloatingPointError):
    pass


class TapeError(TangoError, RuntimeError):
    pass


class GraphError(TangoError, ValueError):
    pass


class DatasetFormatError(TangoError, ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class CheckpointError(TangoError, ValueError):
    pass


class ConfigError(TangoError, ValueError):
    def __init__(self, message: str, key_path: Optional[str] = None):
        self.key_path = key_path
        prefix = f"{key_path}: " if key_path else ""
        super().__init__(prefix + message)


class DivergenceError(TangoError, RuntimeError):
    def __init__(self, epoch: int, message: str = "non-finite loss"):
        self.epoch = epoch
        super().__init__(f"training diverged at epoch {epoch}: {message}")
