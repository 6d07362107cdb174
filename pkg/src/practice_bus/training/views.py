"""
Labeled multi-view datasets with labels taken from the simulator.

Views are captured from noisy approaches to the nominal pose with the device
in the behavior's start state. Each candidate's label is whether its point
lies in the behavior's success region, so no behavior is executed.
"""

import logging
from dataclasses import dataclass

import numpy as np

from practice_bus.config import ScenarioConfig
from practice_bus.features.pca import PcaBasis
from practice_bus.features.pipeline import FeatureExtractor
from practice_bus.features.sampling import SamplerParams
from practice_bus.learning.svm import LabeledDataset
from practice_bus.sim.devices import Behavior
from practice_bus.sim.world import SimWorld
from practice_bus.streams import Streams

logger = logging.getLogger(__name__)

DEFAULT_VIEWS = 10


@dataclass(frozen=True, eq=False)
class ViewDataset:
    """Candidates of every view with region labels, plus the basis they were projected with."""

    data: LabeledDataset
    pca: PcaBasis
    view_of: np.ndarray

    def view(self, index: int) -> LabeledDataset:
        return self.data.subset(np.flatnonzero(self.view_of == index))


def build_view_dataset(
    scenario: ScenarioConfig,
    seed: int = 0,
    views: int = DEFAULT_VIEWS,
    behavior: Behavior = Behavior.PRIMARY,
    extractor: FeatureExtractor | None = None,
) -> ViewDataset:
    """
    Capture ``views`` noisy views and label their candidates by ground truth.

    The PCA basis is fitted on the first view's candidates and applied to all.
    """
    if views < 1:
        raise ValueError(f"views must be at least 1, got {views}")
    streams = Streams.from_seed(seed)
    extractor = extractor or FeatureExtractor()
    world = SimWorld(scenario, streams.device)
    world.device.reset(behavior.start_state)

    learner = scenario.learner
    action = world.device.action_name(behavior)
    sampler = SamplerParams.around(learner.seed_point, learner.sampler_variance, learner.candidates)
    data = LabeledDataset(action, learner.pca_components)
    view_of: list[int] = []
    pca: PcaBasis | None = None

    for index in range(views):
        world.approach(streams.approach)
        observation = world.observe()
        indices = extractor.candidates(observation, sampler, streams.sampling)
        raw = extractor.raw(observation, indices)
        if pca is None:
            pca = extractor.fit(raw, learner.pca_components, action)
        features = extractor.project(observation, indices, raw, pca)
        labels = np.where(world.device.regions_mask(behavior, features.points), 1, -1)
        for values, point, label in zip(features.values, features.points, labels, strict=True):
            data.add(values, point, int(label))
        view_of.extend([index] * len(features))

    assert pca is not None
    logger.info(
        f"📦 {action}: {views} views, {data.n_positive} positive / {data.n_negative} negative"
    )
    return ViewDataset(data, pca, np.asarray(view_of, dtype=np.int64))
