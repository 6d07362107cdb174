"""Initialization, practice, execution with retry and the experiments around them."""

from practice_bus.training.compare import ComparisonResult, compare_selection
from practice_bus.training.density import kde_mode
from practice_bus.training.execution import (
    NO_POSITIVE,
    ExecutionChoice,
    execute_with_retry,
    select_execution_point,
)
from practice_bus.training.session import (
    BehaviorPairSession,
    BehaviorSlot,
    ExecutionReport,
    TrainingReport,
)
from practice_bus.training.trace import TraceRecorder
from practice_bus.training.trainer import PairTrainer, PracticeResult, StopRule
from practice_bus.training.views import ViewDataset, build_view_dataset

__all__ = [
    "NO_POSITIVE",
    "BehaviorPairSession",
    "BehaviorSlot",
    "ComparisonResult",
    "ExecutionChoice",
    "ExecutionReport",
    "PairTrainer",
    "PracticeResult",
    "StopRule",
    "TraceRecorder",
    "TrainingReport",
    "ViewDataset",
    "build_view_dataset",
    "compare_selection",
    "execute_with_retry",
    "kde_mode",
    "select_execution_point",
]
