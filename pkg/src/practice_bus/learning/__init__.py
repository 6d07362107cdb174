"""Class-weighted SVM, grid search and active learning."""

from practice_bus.learning.active import (
    CONVERGED,
    CandidatePool,
    ConvergenceState,
    Pick,
    add_and_retrain,
    random_pick,
    svm_pick,
    visit_converged,
)
from practice_bus.learning.grid import GridSearchResult, grid_search, split_halves
from practice_bus.learning.svm import LabeledDataset, SvmModel, SvmParams, train

__all__ = [
    "CONVERGED",
    "CandidatePool",
    "ConvergenceState",
    "GridSearchResult",
    "LabeledDataset",
    "Pick",
    "SvmModel",
    "SvmParams",
    "add_and_retrain",
    "grid_search",
    "random_pick",
    "split_halves",
    "svm_pick",
    "train",
    "visit_converged",
]
