"""
Pool-based active learning for the behavior classifiers.

The query is the unlabeled candidate closest to the decision boundary, and
only if it is closer than every support vector; when none qualifies the
classifier has converged on that pool.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from practice_bus.learning.svm import LabeledDataset, SvmModel, SvmParams, train

logger = logging.getLogger(__name__)

VISIT_LABEL_CAP = 6
PRACTICE_POSES = 8


class Converged(Enum):
    CONVERGED = "converged"


CONVERGED = Converged.CONVERGED


@dataclass(frozen=True)
class Pick:
    index: int
    features: np.ndarray
    point: np.ndarray
    distance: float


class CandidatePool:
    """
    Index-aligned candidate features and points with consumed flags.

    Consumed candidates are never offered again.
    """

    def __init__(self, features: np.ndarray, points: np.ndarray):
        features = np.atleast_2d(np.asarray(features, dtype=float))
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if len(features) != len(points):
            raise ValueError("candidate features and points must be index-aligned")
        self.features = features
        self.points = points
        self.consumed = np.zeros(len(features), dtype=bool)

    @classmethod
    def empty(cls, n_features: int = 50) -> "CandidatePool":
        return cls(np.empty((0, n_features)), np.empty((0, 3)))

    def __len__(self) -> int:
        return int(np.count_nonzero(~self.consumed))

    @property
    def size(self) -> int:
        return len(self.features)

    def available(self) -> np.ndarray:
        return np.flatnonzero(~self.consumed)

    def consume(self, index: int) -> None:
        if self.consumed[index]:
            raise ValueError(f"candidate {index} was already consumed")
        self.consumed[index] = True

    def fresh(self) -> "CandidatePool":
        """Same candidates with nothing consumed."""
        return CandidatePool(self.features, self.points)


def svm_pick(model: SvmModel, pool: CandidatePool) -> Pick | Converged:
    """
    Closest-to-boundary query with the support-vector guard.

    Ties go to the lowest candidate index.
    """
    remaining = pool.available()
    if remaining.size == 0:
        return CONVERGED
    distances = model.distance(pool.features[remaining])
    threshold = model.support_distance()
    best = int(np.argmin(distances))
    if not distances[best] < threshold:
        return CONVERGED
    index = int(remaining[best])
    return Pick(index, pool.features[index], pool.points[index], float(distances[best]))


def random_pick(pool: CandidatePool, rng: np.random.Generator) -> Pick | Converged:
    """Uniform query baseline; converges only when the pool is exhausted."""
    remaining = pool.available()
    if remaining.size == 0:
        return CONVERGED
    index = int(rng.choice(remaining))
    return Pick(index, pool.features[index], pool.points[index], float("nan"))


def add_and_retrain(
    data: LabeledDataset,
    features: np.ndarray,
    point: np.ndarray,
    label: int,
    params: SvmParams,
) -> SvmModel:
    """Append one labeled example and retrain from scratch with C+ = C- * #neg / #pos."""
    data.add(features, point, label)
    return train(data, params.unresolved())


@dataclass
class ConvergenceState:
    """
    Per-practice-pose convergence of one behavior and the current visit's label count.
    """

    flags: list[bool] = field(default_factory=lambda: [False] * PRACTICE_POSES)
    labels_this_visit: int = 0
    budget: int = VISIT_LABEL_CAP

    def begin_visit(self) -> None:
        self.labels_this_visit = 0

    def can_label(self) -> bool:
        return self.labels_this_visit < self.budget

    def record_label(self) -> None:
        if not self.can_label():
            raise RuntimeError(f"visit budget of {self.budget} labels exhausted")
        self.labels_this_visit += 1

    def mark(self, pose_index: int) -> None:
        self.flags[pose_index] = True

    def is_converged(self, pose_index: int) -> bool:
        return self.flags[pose_index]

    @property
    def all_converged(self) -> bool:
        return all(self.flags)


def visit_converged(
    state: ConvergenceState, pose_index: int, pool: CandidatePool, model: SvmModel
) -> bool:
    """
    Check a pose against the pool computed at the start of its visit.

    Marks the pose converged when no initial candidate beats the support vectors.
    """
    if svm_pick(model, pool.fresh()) is CONVERGED:
        if not state.flags[pose_index]:
            logger.info(f"✅ Practice pose {pose_index} converged")
        state.mark(pose_index)
        return True
    return False
