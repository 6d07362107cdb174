"""
PCA reduction of raw patch vectors.

Fit with the compact (Gram matrix) trick: with n samples of dimension
d >> n, the eigenvectors of the n x n matrix Xc Xc^T map onto those of the
d x d covariance through Xc^T.
"""

import logging
from dataclasses import dataclass

import numpy as np

from practice_bus.errors import FeatureError

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class PcaBasis:
    """
    Frozen PCA projection.

    Attributes:
        mean: (d,) sample mean
        basis: (d, r) orthonormal columns, descending variance
        eigenvalues: (r,) sample variances along the columns (n - 1 denominator)
        components: output dimension k; projections are zero-padded when r < k
        total_variance: sum of all sample variances of the fit set
        behavior: action name the basis belongs to
    """

    mean: np.ndarray
    basis: np.ndarray
    eigenvalues: np.ndarray
    components: int
    total_variance: float
    behavior: str = ""

    @property
    def dimension(self) -> int:
        return int(self.mean.shape[0])

    @property
    def rank(self) -> int:
        return int(self.basis.shape[1])

    def explained_variance_ratio(self) -> np.ndarray:
        if self.total_variance <= 0:
            return np.zeros_like(self.eigenvalues)
        return self.eigenvalues / self.total_variance

    def project(self, raw: np.ndarray) -> np.ndarray:
        """
        Map raw vectors onto the basis.

        Args:
            raw: (d,) or (n, d)

        Returns:
            (k,) or (n, k) coordinates, zero-padded past the rank

        Raises:
            FeatureError: raw dimension does not match the basis
        """
        raw = np.asarray(raw, dtype=float)
        if raw.shape[-1] != self.dimension:
            raise FeatureError(f"expected {self.dimension}-d vectors, got {raw.shape[-1]}")
        coords = (raw - self.mean) @ self.basis
        if self.rank < self.components:
            pad = [(0, 0)] * (coords.ndim - 1) + [(0, self.components - self.rank)]
            coords = np.pad(coords, pad)
        return coords

    def reconstruct(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)[..., : self.rank]
        return self.mean + coords @ self.basis.T


def fit_pca(raw: np.ndarray, k: int = 50, behavior: str = "") -> PcaBasis:
    """
    Fit the top-k principal directions of a set of raw vectors.

    Raises:
        FeatureError: fewer than two vectors, or all vectors identical
    """
    x = np.asarray(raw, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise FeatureError("PCA needs at least two vectors")
    if not np.all(np.isfinite(x)):
        raise FeatureError("PCA input contains non-finite values")
    if np.ptp(x, axis=0).max() == 0:
        raise FeatureError("PCA input has zero variance (all vectors identical)")

    n = x.shape[0]
    mean = x.mean(axis=0)
    centered = x - mean
    gram = centered @ centered.T
    values, vectors = np.linalg.eigh(gram)
    order = np.argsort(values)[::-1]
    values, vectors = values[order], vectors[:, order]

    keep = values > values[0] * RANK_TOLERANCE
    keep[min(k, n) :] = False
    values, vectors = values[keep], vectors[:, keep]

    basis = centered.T @ vectors / np.sqrt(values)
    # re-orthonormalize; Gram-derived columns drift for small eigenvalues
    basis, _ = np.linalg.qr(basis)
    signs = np.sign(basis[np.argmax(np.abs(basis), axis=0), np.arange(basis.shape[1])])
    basis = basis * np.where(signs == 0, 1.0, signs)

    eigenvalues = values / (n - 1)
    total = float(np.sum(centered**2) / (n - 1))
    pca = PcaBasis(mean, basis, eigenvalues, k, total, behavior)
    if pca.rank < k:
        logger.info(f"📐 PCA for {behavior or 'features'}: rank {pca.rank} < {k}, padding")
    logger.info(
        f"📐 PCA for {behavior or 'features'}: {pca.rank} components keep "
        f"{pca.explained_variance_ratio().sum():.1%} of the variance"
    )
    return pca
