"""
Active versus random query selection on a ground-truth labeled pool.

Both learners start from the same one positive and one negative example and
add one pool example per step. The measure is how many labels each needs
before the held-out balanced accuracy reaches the target.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import pandas as pd
from sklearn.metrics import balanced_accuracy_score

from practice_bus.config import ScenarioConfig
from practice_bus.features.pipeline import FeatureExtractor
from practice_bus.learning.active import CONVERGED, CandidatePool, Pick, random_pick, svm_pick
from practice_bus.learning.svm import LabeledDataset, SvmModel, SvmParams, default_gamma, train
from practice_bus.sim.devices import Behavior
from practice_bus.streams import Streams
from practice_bus.training.views import build_view_dataset

logger = logging.getLogger(__name__)

TARGET_ACCURACY = 0.9
POOL_VIEWS = 5

Picker = Callable[[SvmModel, CandidatePool, np.random.Generator], Pick | None]


def active_query(model: SvmModel, pool: CandidatePool, rng: np.random.Generator) -> Pick | None:
    """Closest-to-boundary pick; keeps querying past convergence by dropping the guard."""
    pick = svm_pick(model, pool)
    if pick is not CONVERGED:
        return pick
    remaining = pool.available()
    if remaining.size == 0:
        return None
    distances = model.distance(pool.features[remaining])
    index = int(remaining[int(np.argmin(distances))])
    return Pick(index, pool.features[index], pool.points[index], float(distances.min()))


def random_query(model: SvmModel, pool: CandidatePool, rng: np.random.Generator) -> Pick | None:
    pick = random_pick(pool, rng)
    return None if pick is CONVERGED else pick


@dataclass(frozen=True, eq=False)
class LearningCurve:
    labels: list[int]
    accuracy: list[float]

    def labels_to_reach(self, target: float = TARGET_ACCURACY) -> int | None:
        for count, score in zip(self.labels, self.accuracy, strict=True):
            if score >= target:
                return count
        return None


def learning_curve(
    pool: CandidatePool,
    pool_labels: np.ndarray,
    test: LabeledDataset,
    params: SvmParams,
    picker: Picker,
    rng: np.random.Generator,
    start: tuple[int, int],
    max_labels: int,
) -> LearningCurve:
    """
    Grow a dataset from ``start`` (a positive and a negative pool index) with ``picker``.
    """
    data = LabeledDataset(test.behavior, pool.features.shape[1])
    for index in start:
        data.add(pool.features[index], pool.points[index], int(pool_labels[index]))
        pool.consume(index)

    truth = test.labels
    labels, accuracy = [], []
    while True:
        model = train(data, params)
        labels.append(len(data))
        accuracy.append(float(balanced_accuracy_score(truth, model.predict(test.features))))
        if len(data) >= max_labels:
            break
        pick = picker(model, pool, rng)
        if pick is None:
            break
        data.add(pick.features, pick.point, int(pool_labels[pick.index]))
        pool.consume(pick.index)
    return LearningCurve(labels, accuracy)


@dataclass(frozen=True, eq=False)
class ComparisonResult:
    """
    Labels needed per seed; a learner that never reached the target counts
    as ``max_labels + 1``.
    """

    table: pd.DataFrame
    target: float

    @property
    def active_median(self) -> float:
        return float(self.table["active"].median())

    @property
    def random_median(self) -> float:
        return float(self.table["random"].median())

    @property
    def reduction(self) -> float:
        """Fraction of labels saved by active selection, on medians."""
        return 1.0 - self.active_median / self.random_median


def compare_seed(
    scenario: ScenarioConfig,
    seed: int,
    behavior: Behavior = Behavior.PRIMARY,
    views: int = 10,
    max_labels: int = 150,
    target: float = TARGET_ACCURACY,
    extractor: FeatureExtractor | None = None,
) -> dict[str, int]:
    """
    Labels each selection strategy needs on one seed's views.

    The first views (at most five) form the query pool; the rest are held out.
    """
    if views < 2:
        raise ValueError(f"comparison needs at least two views, got {views}")
    views_set = build_view_dataset(scenario, seed, views, behavior, extractor)
    split = min(POOL_VIEWS, views - 1)
    pool_rows = np.flatnonzero(views_set.view_of < split)
    test = views_set.data.subset(np.flatnonzero(views_set.view_of >= split))
    pooled = views_set.data.subset(pool_rows)
    pool_labels = pooled.labels

    positives = np.flatnonzero(pool_labels > 0)
    negatives = np.flatnonzero(pool_labels < 0)
    if positives.size == 0 or negatives.size == 0 or not test.has_both_labels():
        raise ValueError(f"seed {seed}: pool or held-out views lack one of the labels")

    rng = Streams.from_seed(seed).baseline
    start = (int(rng.choice(positives)), int(rng.choice(negatives)))
    learner = scenario.learner
    gamma = learner.gamma or default_gamma(pooled.features)
    params = SvmParams(gamma=gamma, c_negative=learner.c_negative, tol=learner.solver_tol)

    needed = {}
    for name, picker in (("active", active_query), ("random", random_query)):
        pool = CandidatePool(pooled.features, pooled.points)
        curve = learning_curve(pool, pool_labels, test, params, picker, rng, start, max_labels)
        reached = curve.labels_to_reach(target)
        needed[name] = reached if reached is not None else max_labels + 1
    logger.info(f"📊 seed {seed}: active {needed['active']}, random {needed['random']}")
    return needed


def compare_selection(
    scenario: ScenarioConfig,
    seeds: list[int],
    behavior: Behavior = Behavior.PRIMARY,
    views: int = 10,
    max_labels: int = 150,
    target: float = TARGET_ACCURACY,
    extractor: FeatureExtractor | None = None,
) -> ComparisonResult:
    rows = []
    for seed in seeds:
        needed = compare_seed(scenario, seed, behavior, views, max_labels, target, extractor)
        rows.append({"seed": seed, **needed})
    return ComparisonResult(pd.DataFrame(rows, columns=["seed", "active", "random"]), target)
