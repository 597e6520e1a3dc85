"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: usage errors exit 1, ``DataError``
(including schema violations) exits 2, ``FitError`` and other numerical
failures exit 3.
"""


class MddBayesError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(MddBayesError):
    """A parameter value violates its support (e.g. sigma <= 0)."""


class StructuralError(MddBayesError):
    """A shape, length, or missing-field violation in model inputs."""


class DagError(StructuralError):
    """Symptom DAG is cyclic or its order does not topologically sort it."""


class DataError(MddBayesError):
    """Dataset content is invalid."""


class SchemaError(DataError):
    """A CSV file does not conform to the dataset schema."""


class FitError(MddBayesError):
    """MCMC fitting failed (non-finite density, degenerate warmup, ...)."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


class QueryError(MddBayesError):
    """A prediction query violates its contract (empty query, overlap)."""


class MetricError(MddBayesError):
    """A metric is undefined for the given inputs (e.g. single-class AUC)."""
