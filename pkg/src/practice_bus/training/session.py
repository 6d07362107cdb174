"""State of one behavior pair being learned, and the reports training produces."""

import copy
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import pandas as pd

from practice_bus.features.pca import PcaBasis
from practice_bus.learning.active import ConvergenceState
from practice_bus.learning.svm import LabeledDataset, SvmModel, SvmParams
from practice_bus.sim.devices import Behavior
from practice_bus.sim.geometry import Pose2


@dataclass
class BehaviorSlot:
    """Everything learned for one behavior of the pair."""

    behavior: Behavior
    action: str
    dataset: LabeledDataset
    convergence: ConvergenceState
    pca: PcaBasis | None = None
    model: SvmModel | None = None
    params: SvmParams | None = None

    @property
    def ready(self) -> bool:
        return self.pca is not None and self.model is not None and self.params is not None


@dataclass
class BehaviorPairSession:
    """
    A behavior and its complement on one device.

    Both slots always refer to the same simulated device, so exactly one of
    them is executable at a time.
    """

    scenario: str
    device_kind: str
    seed_point: np.ndarray
    nominal_pose: Pose2
    practice_poses: list[Pose2]
    slots: dict[Behavior, BehaviorSlot]
    visits: int = 0

    @classmethod
    def create(
        cls,
        scenario: str,
        device_kind: str,
        actions: tuple[str, str],
        seed_point: np.ndarray,
        nominal_pose: Pose2,
        practice_poses: list[Pose2],
        n_features: int,
        visit_budget: int,
    ) -> "BehaviorPairSession":
        slots = {}
        for behavior, action in zip((Behavior.PRIMARY, Behavior.COMPLEMENT), actions, strict=True):
            slots[behavior] = BehaviorSlot(
                behavior=behavior,
                action=action,
                dataset=LabeledDataset(action, n_features),
                convergence=ConvergenceState(
                    flags=[False] * len(practice_poses), budget=visit_budget
                ),
            )
        return cls(
            scenario=scenario,
            device_kind=device_kind,
            seed_point=np.asarray(seed_point, dtype=float),
            nominal_pose=nominal_pose,
            practice_poses=list(practice_poses),
            slots=slots,
        )

    def slot(self, behavior: Behavior) -> BehaviorSlot:
        return self.slots[behavior]

    @property
    def ready(self) -> bool:
        return all(s.ready for s in self.slots.values())

    @property
    def total_labels(self) -> int:
        return sum(len(s.dataset) for s in self.slots.values())

    def pose_retired(self, pose_index: int) -> bool:
        return all(s.convergence.is_converged(pose_index) for s in self.slots.values())

    @property
    def converged(self) -> bool:
        return all(s.convergence.all_converged for s in self.slots.values())

    def copy(self) -> "BehaviorPairSession":
        return copy.deepcopy(self)

    def label_table(self) -> pd.DataFrame:
        """Positive / negative / total examples per action."""
        rows = [
            {
                "action": s.action,
                "positive": s.dataset.n_positive,
                "negative": s.dataset.n_negative,
                "total": len(s.dataset),
            }
            for s in self.slots.values()
        ]
        return pd.DataFrame(rows, columns=["action", "positive", "negative", "total"])


@dataclass(frozen=True)
class Attempt:
    point: np.ndarray
    success: bool
    retrained: bool
    fallback: bool = False


@dataclass
class ExecutionReport:
    """Outcome of executing a behavior with retries."""

    action: str
    attempts: list[Attempt] = field(default_factory=list)
    succeeded: bool = False
    returned_point: np.ndarray | None = None

    @property
    def tries(self) -> int:
        return len(self.attempts)


@dataclass
class TrainingReport:
    """Summary of a training run, returned on success and carried by ConvergenceError."""

    converged: bool
    labels: dict[str, dict[str, int]]
    visits: int
    pose_flags: dict[str, list[bool]]

    @classmethod
    def from_session(cls, session: BehaviorPairSession) -> "TrainingReport":
        labels = {
            s.action: {
                "positive": s.dataset.n_positive,
                "negative": s.dataset.n_negative,
                "total": len(s.dataset),
            }
            for s in session.slots.values()
        }
        flags = {s.action: list(s.convergence.flags) for s in session.slots.values()}
        return cls(session.converged, labels, session.visits, flags)

    def to_dict(self) -> dict[str, Any]:
        return {
            "converged": self.converged,
            "labels": self.labels,
            "visits": self.visits,
            "pose_flags": self.pose_flags,
        }
