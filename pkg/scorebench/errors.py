"""Exception hierarchy for scorebench.

Each module raises subclasses of its own base error so callers can decide at
which granularity to recover. The harness, for instance, recovers from any
``CalibrationError`` by recording an absent cell, and the CLI maps error
families to exit codes.
"""

from typing import Any, Optional


class ScoreBenchError(Exception):
    """Base class for all scorebench errors."""


# --- ingest -----------------------------------------------------------------


class IngestError(ScoreBenchError, ValueError):
    """Raised when a panel cannot be loaded, validated or transformed."""


class MissingColumn(IngestError):
    """A required column is absent from the CSV header."""

    def __init__(self, column: str, path: Optional[str] = None):
        self.column = column
        self.path = path
        where = f" in {path}" if path else ""
        super().__init__(f"Missing column '{column}'{where}")


class UnparseableDate(IngestError):
    """A date cell is not an ISO-8601 calendar date."""

    def __init__(self, row: int, value: Any):
        self.row = row
        self.value = value
        super().__init__(f"Row {row}: cannot parse date {value!r} (expected ISO-8601 YYYY-MM-DD)")


class NonFiniteValue(IngestError):
    """A value cell is missing, non-numeric or not finite."""

    def __init__(self, row: int, column: str, value: Any = None):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"Row {row}, column '{column}': non-finite value {value!r}")


class NonMonotoneDates(IngestError):
    """Dates are duplicated or out of order."""

    def __init__(self, row: int, value: Any):
        self.row = row
        self.value = value
        super().__init__(f"Row {row}: date {value} does not strictly increase")


class NonPositiveLevel(IngestError):
    """A log return was requested on a level that is zero or negative."""

    def __init__(self, row: int, column: str, value: float):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"Row {row}, column '{column}': level {value} must be > 0 for log returns")


class InvalidPanel(IngestError):
    """A panel violates a structural invariant (shape, dimension, kind)."""


class InsufficientRows(IngestError):
    """Too few rows for the requested computation."""


class CalibrationError(ScoreBenchError):
    """Raised when a forecasting model cannot be fitted on a window."""


class DegenerateColumn(IngestError, CalibrationError):
    """A column is constant, so its moments or marginal model are undefined."""

    def __init__(self, column: str | int):
        self.column = column
        super().__init__(f"Column {column!r} is constant")


# --- scoring ----------------------------------------------------------------


class ScoringError(ScoreBenchError, ValueError):
    """Raised when a score cannot be evaluated."""


class BetaOutOfRange(ScoringError):
    def __init__(self, beta: float):
        self.beta = beta
        super().__init__(f"Energy score exponent beta={beta} must lie in (0, 2)")


class DegenerateEnsemble(ScoringError):
    def __init__(self, n_draws: int, required: int = 2):
        self.n_draws = n_draws
        super().__init__(f"Ensemble has {n_draws} draws, at least {required} required")


class NonPositiveOrder(ScoringError):
    def __init__(self, p: float):
        self.p = p
        super().__init__(f"Variogram order p={p} must be > 0")


class NonMonotoneQuantileFunction(ScoringError):
    def __init__(self, alpha: float):
        self.alpha = alpha
        super().__init__(f"Quantile function decreases near alpha={alpha:.6f}")


class RangeExcludesObservation(ScoringError):
    def __init__(self, y: float, z_range: tuple[float, float]):
        self.y = y
        self.z_range = z_range
        super().__init__(f"Observation {y} lies outside the integration range {z_range}")


class SingularCovariance(ScoringError):
    """Covariance matrix is not symmetric positive definite."""


class InvalidQuadrature(ScoringError):
    """Quadrature settings are unusable (too few nodes, empty range)."""


class DimensionMismatch(ScoringError):
    """Forecast and observation dimensions disagree."""


# --- forecasting ------------------------------------------------------------


class InsufficientWindow(CalibrationError):
    """The calibration window is shorter than the model requires."""


class InvalidModelSpec(CalibrationError, ValueError):
    """Model settings are inconsistent with the window (factor count, quantile levels)."""


class RankDeficientWindow(CalibrationError):
    def __init__(self, rank: int, d: int):
        self.rank = rank
        self.d = d
        super().__init__(f"Window covariance has rank {rank} < {d}")


class SolverDivergence(CalibrationError):
    """Quantile regression failed to decrease the pinball loss."""


class NonConvergence(CalibrationError):
    """Likelihood optimisation failed from every starting point."""


class CholeskyFailure(CalibrationError):
    """A correlation matrix could not be factorised even after clipping."""


class ModelDocumentError(ScoreBenchError, ValueError):
    """A serialized calibrated-model document is malformed or has a foreign schema version."""


# --- harness ----------------------------------------------------------------


class HarnessError(ScoreBenchError):
    """Raised when the simulation grid cannot be set up or persisted."""


class InsufficientHistory(HarnessError, ValueError):
    def __init__(self, rows: int, min_history: int):
        self.rows = rows
        self.min_history = min_history
        super().__init__(f"Panel has {rows} rows; evaluation needs more than {min_history} rows of history")


class InvalidGridSpec(HarnessError, ValueError):
    """Grid specification violates an invariant."""


class MissingTensor(HarnessError, FileNotFoundError):
    def __init__(self, path: str):
        self.path = path
        super().__init__(f"No score tensor manifest found under {path}")


# --- metrics ----------------------------------------------------------------


class MetricsError(ScoreBenchError, ValueError):
    """Raised when a discrimination metric is undefined for its inputs."""


class AllPairsExcluded(MetricsError):
    def __init__(self, n: int):
        self.n = n
        super().__init__(f"All {n} DGP scores are below the ratio guard; relative score undefined")


class LengthMismatch(MetricsError):
    def __init__(self, left: int, right: int):
        super().__init__(f"Paired score vectors differ in length: {left} != {right}")


class EmptyInput(MetricsError):
    """A metric was asked to summarise zero values."""


class DegenerateDgpScore(MetricsError):
    def __init__(self, value: float):
        self.value = value
        super().__init__(f"DGP mean score {value} is too close to zero for a ratio")


class SubsampleExceedsN(MetricsError):
    def __init__(self, subsample: int, n: int):
        super().__init__(f"Subsample size {subsample} exceeds the {n} available scores")


class TooFewPoints(MetricsError):
    def __init__(self, n: int, required: int = 10):
        super().__init__(f"Kernel density needs at least {required} points, got {n}")


class ConstantSample(MetricsError):
    def __init__(self, value: float):
        self.value = value
        super().__init__(f"All values equal {value}; a kernel density is undefined")


# --- configuration / cli ------------------------------------------------------


class ConfigError(ScoreBenchError, ValueError):
    """The run configuration is unreadable or invalid."""


class MissingPanelCache(ScoreBenchError, FileNotFoundError):
    def __init__(self, name: str, path: str):
        self.name = name
        self.path = path
        super().__init__(f"Panel '{name}' has not been ingested (expected {path}); run `scorebench ingest` first")
