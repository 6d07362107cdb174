"""Heatmaps of where a trained behavior is expected to succeed."""

import logging
from dataclasses import dataclass

import numpy as np

from practice_bus.features.pipeline import FeatureExtractor
from practice_bus.features.sampling import MAX_GRID_POINTS, grid_indices, window_half_width
from practice_bus.sim.devices import Behavior
from practice_bus.sim.world import SimWorld
from practice_bus.training.session import BehaviorPairSession

logger = logging.getLogger(__name__)

GREEN = np.array([0.0, 255.0, 0.0])
BLEND = 0.5


@dataclass(frozen=True, eq=False)
class Heatmap:
    """
    Attributes:
        rgb: the observation with positive grid blocks tinted green
        points: (n, 3) grid points that were classified
        positive: (n,) classifier verdict per grid point
        truth: (n,) whether each grid point is in the ground-truth success region
        stride: pixel spacing of the grid
    """

    rgb: np.ndarray
    points: np.ndarray
    positive: np.ndarray
    truth: np.ndarray
    stride: int

    @property
    def green_fraction(self) -> float:
        return float(self.positive.mean()) if self.positive.size else 0.0

    def overlap(self) -> float:
        """Share of green blocks whose point lies inside the true success region."""
        if not self.positive.any():
            return 0.0
        return float(self.truth[self.positive].mean())


def tint(rgb: np.ndarray, pixels: np.ndarray, stride: int) -> np.ndarray:
    """Blend green over the ``stride`` x ``stride`` block centered on each pixel."""
    out = rgb.astype(float)
    rows, cols = rgb.shape[:2]
    half = stride // 2
    for u, v in pixels:
        r0, r1 = max(v - half, 0), min(v - half + stride, rows)
        c0, c1 = max(u - half, 0), min(u - half + stride, cols)
        out[r0:r1, c0:c1] = (1.0 - BLEND) * out[r0:r1, c0:c1] + BLEND * GREEN
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def render_heatmap(
    session: BehaviorPairSession,
    world: SimWorld,
    which: Behavior,
    extractor: FeatureExtractor | None = None,
    stride: int = 4,
    max_points: int = MAX_GRID_POINTS,
) -> Heatmap:
    """
    Classify a dense grid of cloud points from the nominal pose.

    The device is put into the behavior's start state first, so the image
    shows what the robot sees before executing it. Ground truth comes from
    the simulated device, never from the classifier.
    """
    slot = session.slot(which)
    if not slot.ready:
        raise RuntimeError(f"{slot.action}: heatmap needs a trained classifier")
    assert slot.model is not None and slot.pca is not None
    extractor = extractor or FeatureExtractor()

    world.device.reset(which.start_state)
    world.move_to(session.nominal_pose)
    observation = world.observe()

    half_width = window_half_width(world.config.learner.sampler_variance)
    indices, used_stride = grid_indices(
        observation.pixels, observation.points, session.seed_point, half_width, stride, max_points
    )

    if indices.size == 0:
        logger.warning(f"⚠️ {slot.action}: no cloud points inside the heatmap window")
        empty = np.zeros(0, dtype=bool)
        return Heatmap(observation.rgb.copy(), np.empty((0, 3)), empty, empty, used_stride)

    features = extractor.features(observation, indices, slot.pca)
    positive = slot.model.predict(features.values) > 0
    truth = world.device.regions_mask(which, features.points)
    rgb = tint(observation.rgb, features.pixels[positive], used_stride)
    heatmap = Heatmap(rgb, features.points, positive, truth, used_stride)
    logger.info(
        f"🗺️ {slot.action}: {np.count_nonzero(positive)}/{len(positive)} grid points "
        f"positive, overlap {heatmap.overlap():.2f}"
    )
    return heatmap
