"""
Multi-scale image patch vectors.

For every width, a square crop centered on the pixel is taken (indices
clamped to the image, which equals edge replication), box-averaged down to
``target x target`` and flattened row-major with RGB interleaved. Scales are
concatenated small to large.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class PatchSpec:
    widths: tuple[int, ...] = (41, 81, 161, 321)
    target: int = 31
    channels: int = 3

    def __post_init__(self) -> None:
        if any(w % 2 == 0 for w in self.widths):
            raise ValueError(f"patch widths must be odd, got {self.widths}")
        if any(w < self.target for w in self.widths):
            raise ValueError("patch widths must be at least the target size")

    @property
    def vector_length(self) -> int:
        return len(self.widths) * self.target * self.target * self.channels

    @property
    def max_width(self) -> int:
        return max(self.widths)


@lru_cache(maxsize=16)
def area_matrix(width: int, target: int) -> np.ndarray:
    """
    (target, width) matrix averaging source pixels into target bins by overlap.

    Source pixel j covers [j, j+1); target bin i covers
    [i*width/target, (i+1)*width/target). Rows sum to one.
    """
    scale = width / target
    lo = np.arange(target)[:, None] * scale
    hi = lo + scale
    src = np.arange(width)[None, :]
    overlap = np.clip(np.minimum(hi, src + 1) - np.maximum(lo, src), 0.0, None)
    matrix = overlap / scale
    matrix.setflags(write=False)
    return matrix


def clamped_crop(image: np.ndarray, u: int, v: int, width: int) -> np.ndarray:
    half = width // 2
    rows = np.clip(np.arange(v - half, v + half + 1), 0, image.shape[0] - 1)
    cols = np.clip(np.arange(u - half, u + half + 1), 0, image.shape[1] - 1)
    return image[np.ix_(rows, cols)]


def extract_patch_vector(image: np.ndarray, pixel: tuple[int, int], spec: PatchSpec) -> np.ndarray:
    """Raw intensity patch vector of length ``spec.vector_length`` at pixel (u, v)."""
    u, v = int(pixel[0]), int(pixel[1])
    parts = []
    for width in spec.widths:
        crop = clamped_crop(image, u, v, width).astype(np.float64)
        a = area_matrix(width, spec.target)
        # (C, w, w) -> (C, t, t), then back to (t, t, C)
        reduced = a @ np.moveaxis(crop, -1, 0) @ a.T
        parts.append(np.moveaxis(reduced, 0, -1).ravel())
    return np.concatenate(parts)


def extract_patch_matrix(image: np.ndarray, pixels: np.ndarray, spec: PatchSpec) -> np.ndarray:
    """Stack patch vectors for an (N, 2) array of (u, v) pixels."""
    pixels = np.atleast_2d(pixels)
    out = np.empty((len(pixels), spec.vector_length))
    for row, pixel in enumerate(pixels):
        out[row] = extract_patch_vector(image, pixel, spec)
    return out
