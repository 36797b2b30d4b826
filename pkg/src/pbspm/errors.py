"""Exception hierarchy shared by all modules.

Parameter misuse raises plain ``ValueError``. Everything that depends on the
*content* of an input dataset derives from :class:`DataError`; failures of the
numerical machinery derive from :class:`NumericalError`. The CLI maps these to
distinct exit codes.
"""


class DataError(Exception):
    """The input data cannot support the requested operation."""


class ParseError(DataError):
    """A malformed line in an edge-list file.

    Attributes:
        line_no: 1-based line number of the offending line.
    """

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class EmptyInputError(DataError):
    """An edge stream with no events."""


class EmptyGraphError(DataError):
    """Simplification left no edges (e.g. every event was a self-loop)."""


class DegenerateSplitError(DataError):
    """A train/probe split where one side is empty or unusable."""


class DegeneratePerturbationError(DataError):
    """A perturbation that would remove zero edges."""


class UndefinedMetricError(DataError):
    """A metric evaluated against an empty reference set."""


class ZeroVarianceError(DataError):
    """Pearson correlation requested for a constant vector."""


class NumericalError(Exception):
    """An eigensolver or linear solve failed, or a series diverges."""
