"""Exception types shared by the whole package.

The CLI maps these onto exit codes, so keep the hierarchy flat.
"""


class GrainnetError(Exception):
    """Base class for every error raised on purpose by grainnet."""


class StructuralError(GrainnetError, ValueError):
    """Input data does not have the required shape (bad maps, bad bijections)."""


class PreconditionError(GrainnetError):
    """Input is well formed but an operation's precondition fails."""


class ParseError(GrainnetError):
    """A file could not be decoded into the expected structure."""


class DiagnosticError(GrainnetError):
    """A construction that should succeed did not; carries a description."""
