"""Exception hierarchy for practice_bus."""

from typing import Any


class PracticeBusError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(PracticeBusError):
    """Scenario file or manifest is malformed or out of range."""


class SceneError(PracticeBusError):
    """Scene cannot be generated or captured (placement, frustum)."""


class VerificationError(PracticeBusError):
    """Verifier inputs are inconsistent."""


class FeatureError(PracticeBusError):
    """Feature extraction or PCA failure."""


class TrainingDataError(PracticeBusError):
    """Dataset cannot be used to train a classifier."""


class GridSearchError(PracticeBusError):
    """Hyperparameter search cannot run."""


class FormatError(PracticeBusError):
    """Binary or text artifact has the wrong magic, version or shape."""


class InitializationError(PracticeBusError):
    """Initialization did not gather both labels for both behaviors in time."""

    def __init__(self, message: str, trace: list[dict[str, Any]] | None = None):
        super().__init__(message)
        self.trace = trace or []


class ConvergenceError(PracticeBusError):
    """Training hit its label cap before every practice pose converged."""

    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report
