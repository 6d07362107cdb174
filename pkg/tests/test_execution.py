"""Tests for choosing where to execute a behavior."""

import numpy as np
import pytest

from practice_bus.errors import FeatureError
from practice_bus.training.execution import (
    NO_POSITIVE,
    ExecutionChoice,
    execute_with_retry,
    select_execution_point,
)
from practice_bus.training.trainer import PairTrainer


class SignModel:
    """Classifies by the sign of the first feature."""

    def predict(self, x):
        return np.where(x[:, 0] > 0, 1, -1)


class Candidates:
    def __init__(self, values, points):
        self.values = values
        self.points = points


class Cloud:
    def __init__(self, points):
        self.points = points

    def nearest_index(self, point):
        return int(np.argmin(np.sum((self.points - point) ** 2, axis=1)))


def wall_points(rng, center, n, scale):
    xz = rng.normal(scale=scale, size=(n, 2)) + center
    return np.column_stack([xz[:, 0], np.zeros(n), xz[:, 1]])


@pytest.mark.unit
class TestSelectExecutionPoint:
    """Test the execution point comes from the positive candidates"""

    def test_no_positive(self, rng):
        """Test an all-negative pool reports no positive"""
        points = wall_points(rng, [1.5, 1.2], 10, 0.05)
        candidates = Candidates(-np.ones((10, 2)), points)

        assert select_execution_point(SignModel(), candidates, Cloud(points)) is NO_POSITIVE

    def test_picks_cloud_point_near_positives(self, rng):
        """Test the chosen point is a cloud point inside the positive cluster"""
        positive = wall_points(rng, [1.5, 1.2], 20, 0.005)
        negative = wall_points(rng, [1.0, 0.8], 20, 0.005)
        points = np.vstack([positive, negative])
        values = np.vstack([np.ones((20, 2)), -np.ones((20, 2))])
        cloud = Cloud(np.vstack([points, wall_points(rng, [1.2, 1.0], 50, 0.2)]))

        choice = select_execution_point(SignModel(), Candidates(values, points), cloud)

        assert isinstance(choice, ExecutionChoice)
        np.testing.assert_array_equal(choice.point, cloud.points[choice.cloud_index])
        assert np.linalg.norm(choice.mode - [1.5, 0.0, 1.2]) < 0.02
        assert np.linalg.norm(choice.point - choice.mode) < 0.02

    def test_point_is_a_copy(self, rng):
        """Test the returned point does not alias the cloud"""
        points = wall_points(rng, [1.5, 1.2], 10, 0.005)
        cloud = Cloud(points.copy())

        choice = select_execution_point(SignModel(), Candidates(np.ones((10, 2)), points), cloud)
        choice.point[:] = 0.0

        assert not np.all(cloud.points[choice.cloud_index] == 0.0)


@pytest.mark.integration
class TestExecuteWithRetry:
    """Test retrying execution on a trained light switch"""

    @pytest.fixture
    def trainer(self, fresh_bus, light_switch, fast_extractor):
        trainer = PairTrainer(light_switch, 0, extractor=fast_extractor)
        trainer.init()
        yield trainer
        trainer.destroy()

    def test_every_attempt_is_learned(self, trainer):
        """Test each attempt is labeled, stored and reported in order"""
        slot = trainer.session.slot(trainer.world.device.applicable())
        before = len(slot.dataset)
        seen = []

        report = execute_with_retry(
            trainer.world,
            slot,
            trainer.extractor,
            trainer.learner,
            trainer.session.seed_point,
            on_label=lambda *args: seen.append(args[3]),
            max_attempts=3,
        )

        assert 1 <= report.tries <= 3
        assert len(slot.dataset) == before + report.tries
        assert seen == slot.dataset.labels[before:].tolist()
        assert report.succeeded == (seen[-1] == 1)
        assert seen[:-1] == [-1] * (report.tries - 1)

    def test_empty_window(self, trainer):
        """Test a window with no cloud points in it"""
        slot = trainer.session.slot(trainer.world.device.applicable())
        far = trainer.session.seed_point + np.array([10.0, 0.0, 10.0])

        with pytest.raises(FeatureError, match="execution window"):
            execute_with_retry(trainer.world, slot, trainer.extractor, trainer.learner, far)
