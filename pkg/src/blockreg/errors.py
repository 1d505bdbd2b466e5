"""Exception hierarchy shared across the package.

Two branches matter for scripting: specification/parse problems (exit code 2
at the command line) and numerical failures (exit code 3).
"""


class SpecError(ValueError):
    """An invalid specification: bad family, odd trig dimension, bad grid, ..."""


class DataError(ValueError):
    """Malformed input data: unparsable files, dimension mismatches."""


class NumericError(RuntimeError):
    """A numerical routine failed (factorization, cross-check disagreement)."""


class NonConvergenceError(NumericError):
    """An iterative solver hit its iteration cap.

    Carries the last iterate so callers can inspect how far it got.
    """

    def __init__(self, message, last_iterate=None, diagnostics=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.diagnostics = diagnostics or {}


class DivergenceError(NumericError):
    """An iteration left its valid region and could not recover.

    Carries trajectory diagnostics for post-mortem inspection.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory or []
