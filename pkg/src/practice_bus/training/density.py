"""
Mode of a Gaussian kernel density over 3D points.

Points from one observation lie on a plane, so the density is fitted in the
affine span of the points; a full-rank 3D KDE would be singular there.
"""

import itertools
import logging

import numpy as np
from scipy.stats import gaussian_kde

logger = logging.getLogger(__name__)

SPAN_TOLERANCE = 1e-9


def affine_span(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Origin and orthonormal row basis (r, 3) of the smallest affine subspace
    containing ``points``.
    """
    origin = points.mean(axis=0)
    _, singular, vt = np.linalg.svd(points - origin, full_matrices=False)
    if singular.size == 0 or singular[0] <= 1e-12:
        return origin, np.empty((0, points.shape[1]))
    rank = int(np.count_nonzero(singular > singular[0] * SPAN_TOLERANCE))
    return origin, vt[:rank]


def _climb(
    kde: gaussian_kde, start: np.ndarray, value: float, grid_step: float, min_step: float
) -> tuple[np.ndarray, float]:
    dims = start.shape[0]
    offsets = np.array(
        [o for o in itertools.product((-1.0, 0.0, 1.0), repeat=dims) if any(o)]
    )
    x, best = start, value
    step = grid_step
    while step >= min_step:
        for _ in range(10_000):
            trial = x + step * offsets
            values = kde(trial.T)
            k = int(np.argmax(values))
            if values[k] <= best:
                break
            x, best = trial[k], float(values[k])
        step /= 2.0
    return x, best


def kde_mode(
    points: np.ndarray,
    bandwidth: str | float = "scott",
    grid_step: float = 0.005,
    min_step: float = 0.00025,
    max_starts: int = 16,
) -> np.ndarray:
    """
    Locate the highest-density location of a Gaussian KDE of ``points``.

    The density is evaluated at every point; the densest ``max_starts``
    points seed a hill climb on a ``grid_step`` lattice, refined by halving
    the step until it drops below ``min_step``. A single point (or a set of
    identical points) is its own mode.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(points) == 1:
        return points[0].copy()
    origin, span = affine_span(points)
    if span.shape[0] == 0:
        return points[0].copy()

    coords = (points - origin) @ span.T
    kde = gaussian_kde(coords.T, bw_method=bandwidth)
    density = kde(coords.T)
    starts = np.argsort(-density, kind="stable")[:max_starts]

    best_x, best_value = coords[starts[0]], -np.inf
    for s in starts:
        x, value = _climb(kde, coords[s], float(density[s]), grid_step, min_step)
        if value > best_value:
            best_x, best_value = x, value
    mode = origin + best_x @ span
    logger.debug(f"⛰️ KDE mode over {len(points)} points at {np.round(mode, 4)}")
    return mode
