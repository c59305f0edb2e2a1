"""Exception hierarchy shared across the package."""


class DimersurfError(Exception):
    """Base class for all structured errors raised by this package."""


class GraphFormatError(DimersurfError):
    """Input description violates a graph invariant.

    The message names the first violated invariant so callers (and the
    CLI) can report something actionable.
    """


class NotACycleError(DimersurfError):
    """A chain fed to a homology operation is not a cycle of the
    requested variant."""


class ObstructionError(DimersurfError):
    """A requested object provably does not exist (parity obstruction etc.)."""


class SurgeryError(DimersurfError):
    """Cut or glue data violates the validity conditions."""


class CrossCheckError(DimersurfError):
    """Two independent computations of the same quantity disagree."""
