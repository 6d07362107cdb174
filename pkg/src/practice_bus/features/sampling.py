"""Gaussian candidate sampling over a registered point cloud."""

import logging
from dataclasses import dataclass

import numpy as np

from practice_bus.errors import FeatureError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SamplerParams:
    """
    Candidate sampler around a mean point.

    Attributes:
        mean: center of the Gaussian (m)
        variances: diagonal covariance (v_x, v_y, v_z) in m^2
        count: number of candidates to draw
    """

    mean: tuple[float, float, float]
    variances: tuple[float, float, float]
    count: int = 200

    def __post_init__(self) -> None:
        if len(self.mean) != 3 or len(self.variances) != 3:
            raise ValueError("sampler mean and variances must be 3D")
        if min(self.variances) <= 0:
            raise ValueError(f"sampler variances must be > 0, got {self.variances}")
        if self.count < 1:
            raise ValueError("sampler count must be >= 1")

    @classmethod
    def around(
        cls, point: np.ndarray, variances: tuple[float, float, float], count: int
    ) -> "SamplerParams":
        x, y, z = (float(v) for v in point)
        return cls((x, y, z), variances, count)


def gaussian_log_weights(points: np.ndarray, params: SamplerParams) -> np.ndarray:
    diff = np.asarray(points, dtype=float) - np.asarray(params.mean)
    return -0.5 * np.sum(diff**2 / np.asarray(params.variances), axis=1)


def gaussian_weights(points: np.ndarray, params: SamplerParams) -> np.ndarray:
    """Normalized sampling probabilities of each cloud point."""
    logw = gaussian_log_weights(points, params)
    w = np.exp(logw - logw.max())
    return w / w.sum()


def sample_candidates(
    points: np.ndarray, params: SamplerParams, rng: np.random.Generator
) -> np.ndarray:
    """
    Draw distinct cloud indices with probability proportional to the Gaussian density.

    Returns every index (in random order) when the cloud has no more points
    than requested. When the weights underflow so that fewer than ``count``
    points have nonzero probability, the nearest points by Mahalanobis
    distance are returned instead.
    """
    n = len(points)
    if n == 0:
        raise FeatureError("cannot sample candidates from an empty cloud")
    if params.count >= n:
        logger.debug(f"📉 Cloud has {n} points, returning all of them")
        return rng.permutation(n)

    logw = gaussian_log_weights(points, params)
    w = np.exp(logw - logw.max())
    if np.count_nonzero(w) < params.count:
        logger.warning(
            f"⚠️ Only {np.count_nonzero(w)} cloud points carry weight; "
            f"taking the nearest {params.count}"
        )
        return np.argsort(-logw, kind="stable")[: params.count]
    return rng.choice(n, size=params.count, replace=False, p=w / w.sum())


def sample_with_replacement(
    points: np.ndarray, params: SamplerParams, rng: np.random.Generator, size: int
) -> np.ndarray:
    """Independent draws from the same distribution; used to check the weights."""
    return rng.choice(len(points), size=size, replace=True, p=gaussian_weights(points, params))


# ============================================================================
# Regular grids
# ============================================================================

WINDOW_SIGMAS = 2.0
MAX_GRID_POINTS = 2500


def window_half_width(variances: tuple[float, float, float]) -> np.ndarray:
    """Half extent of the box covering ``WINDOW_SIGMAS`` sampler deviations, unbounded in depth."""
    half_width = WINDOW_SIGMAS * np.sqrt(np.asarray(variances, dtype=float))
    half_width[1] = np.inf
    return half_width


def grid_indices(
    pixels: np.ndarray,
    points: np.ndarray,
    center: np.ndarray,
    half_width: np.ndarray,
    stride: int,
    max_points: int = MAX_GRID_POINTS,
) -> tuple[np.ndarray, int]:
    """
    Cloud indices on a regular pixel grid inside a box around ``center``.

    The stride doubles until the grid holds at most ``max_points`` points.
    """
    inside = np.all(np.abs(points - center) <= half_width, axis=1)
    while True:
        on_grid = inside & (pixels[:, 0] % stride == 0) & (pixels[:, 1] % stride == 0)
        if np.count_nonzero(on_grid) <= max_points:
            return np.flatnonzero(on_grid), stride
        stride *= 2
