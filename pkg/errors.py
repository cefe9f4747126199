"""Exception hierarchy shared by every module.

All errors derive from ValueError so callers that only know about bad input keep working.
"""
from typing import Any, Optional


class RaagError(ValueError):
    """Root of every toolkit error"""

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class ConfigError(RaagError):
    pass


class GraphFormatError(RaagError):
    """Malformed defining graph (self-loops, duplicate or dangling edges)"""


class UnknownVertexError(RaagError):
    pass


class AmbientMismatchError(RaagError):
    """Objects built over different defining graphs were combined"""


class NotACliqueError(RaagError):
    pass


class NotParallelError(RaagError):
    pass


class NotInFlatError(RaagError):
    pass


class NotAJoinError(RaagError):
    pass


class LoopError(RaagError):
    """Input is not an immersed loop in the complement graph"""


class DatumError(RaagError):
    """Blow-up datum violates surjectivity, fiber bound or window coverage"""


class CompatibilityError(RaagError):
    pass


class ProjectionError(RaagError):
    pass


class StraighteningError(RaagError):
    pass


class LabelClashError(RaagError):
    """Two edges with the same label and direction meet at a vertex"""


class CocycleError(RaagError):
    pass


class InputFormatError(RaagError):
    """Unreadable input file; carries the position when the decoder knows it"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column
