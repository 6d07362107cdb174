"""
Using a trained classifier: pick where to act, act, and learn from failures.

The execution point is the cloud point nearest the density mode of the
grid points classified positive. A failed attempt is added as a negative
example, the classifier is retrained and the point is chosen again from the
same candidate features.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum

import numpy as np

from practice_bus.config import LearnerConfig
from practice_bus.errors import FeatureError
from practice_bus.features.pca import PcaBasis
from practice_bus.features.pipeline import FeatureExtractor, FeatureSet
from practice_bus.learning.active import add_and_retrain
from practice_bus.learning.svm import SvmModel
from practice_bus.sim.scene import Observation
from practice_bus.sim.world import SimWorld
from practice_bus.training.density import kde_mode
from practice_bus.training.session import Attempt, BehaviorSlot, ExecutionReport

logger = logging.getLogger(__name__)


class NoPositive(Enum):
    NO_POSITIVE = "no-positive"


NO_POSITIVE = NoPositive.NO_POSITIVE


@dataclass(frozen=True)
class ExecutionChoice:
    point: np.ndarray
    cloud_index: int
    mode: np.ndarray


# (slot, features, point, label, phase, distance, pool size)
LabelCallback = Callable[[BehaviorSlot, np.ndarray, np.ndarray, int, str, float, int], None]


def select_execution_point(
    model: SvmModel,
    candidates: FeatureSet,
    observation: Observation,
    bandwidth: str | float = "scott",
    grid_step: float = 0.005,
) -> ExecutionChoice | NoPositive:
    """Cloud point nearest the KDE mode of the positively classified candidates."""
    positive = model.predict(candidates.values) > 0
    if not positive.any():
        return NO_POSITIVE
    mode = kde_mode(candidates.points[positive], bandwidth=bandwidth, grid_step=grid_step)
    index = observation.nearest_index(mode)
    return ExecutionChoice(observation.points[index].copy(), index, mode)


def execute_with_retry(
    world: SimWorld,
    slot: BehaviorSlot,
    extractor: FeatureExtractor,
    learner: LearnerConfig,
    center: np.ndarray,
    phase: str = "operate",
    on_label: LabelCallback | None = None,
    max_attempts: int | None = None,
) -> ExecutionReport:
    """
    Execute ``slot.behavior`` from the robot's current pose until it succeeds.

    The view is classified once on a regular grid over the sampler window
    around ``center``, so the density of positives follows the classifier and
    not the sampling distribution. Every attempt is labeled, appended to the
    slot's dataset and followed by a retrain; the next point is chosen from the
    same grid features. When no grid point classifies positive, the untried
    one with the largest decision value is used instead.

    Raises:
        FeatureError: no cloud point lies inside the window
    """
    if not slot.ready:
        raise RuntimeError(f"{slot.action}: execution needs a trained classifier")
    assert slot.model is not None and slot.pca is not None and slot.params is not None
    pca: PcaBasis = slot.pca
    limit = max_attempts if max_attempts is not None else learner.retry_attempts

    observation = world.observe()
    indices = extractor.grid(
        observation, center, learner.sampler_variance, learner.execution_stride
    )
    if indices.size == 0:
        raise FeatureError(f"{slot.action}: no cloud points inside the execution window")
    candidates = extractor.features(observation, indices, pca)

    report = ExecutionReport(slot.action)
    tried: set[int] = set()
    before = observation
    for attempt in range(1, limit + 1):
        choice = select_execution_point(
            slot.model, candidates, observation, learner.kde_bandwidth, learner.kde_grid_step
        )
        fallback = choice is NO_POSITIVE
        if isinstance(choice, ExecutionChoice):
            cloud_index = choice.cloud_index
        else:
            scores = slot.model.decision_function(candidates.values)
            order = np.argsort(-scores, kind="stable")
            untried = [int(k) for k in order if int(candidates.indices[k]) not in tried]
            cloud_index = int(candidates.indices[untried[0] if untried else order[0]])
            logger.debug(f"{slot.action}: no positive candidate, trying the best-scored one")

        point = observation.points[cloud_index].copy()
        features = extractor.features(observation, np.array([cloud_index]), pca).values[0]
        distance = float(slot.model.distance(features)[0])
        tried.add(cloud_index)

        trial = world.act(slot.behavior, point, before)
        before = trial.after
        label = 1 if trial.success else -1
        slot.model = add_and_retrain(slot.dataset, features, point, label, slot.params)
        report.attempts.append(Attempt(point, trial.success, retrained=True, fallback=fallback))
        if on_label is not None:
            on_label(slot, features, point, label, phase, distance, len(candidates))

        if trial.success:
            report.succeeded = True
            report.returned_point = trial.outcome.point
            logger.debug(f"✅ {slot.action} succeeded on attempt {attempt}")
            return report
        logger.debug(f"🔁 {slot.action} failed on attempt {attempt}, retrained")

    logger.warning(f"❌ {slot.action} failed {limit} attempts in a row")
    return report
