"""Observation to feature vectors: sample, crop, scale, project."""

from dataclasses import dataclass

import numpy as np

from practice_bus.features.patches import PatchSpec, extract_patch_matrix
from practice_bus.features.pca import PcaBasis, fit_pca
from practice_bus.features.sampling import (
    SamplerParams,
    grid_indices,
    sample_candidates,
    window_half_width,
)
from practice_bus.sim.scene import Observation

# patch vectors are raw 0..255 intensities; features are built from 0..1 values
INTENSITY_SCALE = 1.0 / 255.0


@dataclass(frozen=True, eq=False)
class FeatureSet:
    """
    Feature vectors for a set of cloud points of one observation.

    Attributes:
        values: (n, k) reduced feature vectors
        points: (n, 3) source points
        pixels: (n, 2) source pixels (u, v)
        indices: (n,) cloud indices within the observation
    """

    values: np.ndarray
    points: np.ndarray
    pixels: np.ndarray
    indices: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


class FeatureExtractor:
    def __init__(self, spec: PatchSpec | None = None):
        self.spec = spec or PatchSpec()

    def candidates(
        self, observation: Observation, params: SamplerParams, rng: np.random.Generator
    ) -> np.ndarray:
        return sample_candidates(observation.points, params, rng)

    def grid(
        self,
        observation: Observation,
        center: np.ndarray,
        variances: tuple[float, float, float],
        stride: int,
    ) -> np.ndarray:
        """Cloud indices on a regular pixel grid covering the sampler window around ``center``."""
        indices, _ = grid_indices(
            observation.pixels, observation.points, center, window_half_width(variances), stride
        )
        return indices

    def raw(self, observation: Observation, indices: np.ndarray) -> np.ndarray:
        """Scaled patch vectors at the given cloud indices."""
        pixels = observation.pixels[np.asarray(indices, dtype=np.int64)]
        return extract_patch_matrix(observation.rgb, pixels, self.spec) * INTENSITY_SCALE

    def fit(self, raw: np.ndarray, components: int, behavior: str = "") -> PcaBasis:
        return fit_pca(raw, components, behavior)

    def project(
        self, observation: Observation, indices: np.ndarray, raw: np.ndarray, basis: PcaBasis
    ) -> FeatureSet:
        indices = np.asarray(indices, dtype=np.int64)
        return FeatureSet(
            values=basis.project(raw),
            points=observation.points[indices],
            pixels=observation.pixels[indices],
            indices=indices,
        )

    def features(
        self, observation: Observation, indices: np.ndarray, basis: PcaBasis
    ) -> FeatureSet:
        return self.project(observation, indices, self.raw(observation, indices), basis)
