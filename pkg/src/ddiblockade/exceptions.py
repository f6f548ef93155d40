"""Exception hierarchy.

Every error raised on purpose by the package derives from ``BlockadeError``
so that callers (and the sweep layer) can tell modelling/numerical failures
apart from programming errors.
"""


class BlockadeError(Exception):
    """Base class for all package errors."""

    tag = "error"


class InvalidCutoffError(BlockadeError, ValueError):
    tag = "invalid-cutoff"


class InvalidIndexError(BlockadeError, ValueError):
    tag = "invalid-index"


class DimensionMismatchError(BlockadeError, ValueError):
    tag = "dimension-mismatch"


class InvalidParameterError(BlockadeError, ValueError):
    tag = "invalid-parameter"


class SingularGeometryError(BlockadeError, ValueError):
    tag = "singular-geometry"


class NoSolutionError(BlockadeError, ValueError):
    tag = "no-solution"


class DegenerateSteadyStateError(BlockadeError, RuntimeError):
    tag = "degenerate-steady-state"


class AmbiguousSteadyStateError(BlockadeError, RuntimeError):
    tag = "ambiguous-steady-state"


class NumericalFailureError(BlockadeError, RuntimeError):
    """Solver finished but the result violates density-matrix invariants.

    ``diagnostics`` holds the measured deviations.
    """

    tag = "numerical-failure"

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class StiffnessError(BlockadeError, RuntimeError):
    tag = "stiffness"


class NoConvergenceError(BlockadeError, RuntimeError):
    tag = "no-convergence"


class UndefinedCorrelationError(BlockadeError, ValueError):
    tag = "undefined-correlation"


class ScanWindowError(BlockadeError, ValueError):
    tag = "scan-window"


class ConfigError(BlockadeError, ValueError):
    tag = "config"
