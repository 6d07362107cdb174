"""Tests for PCA feature reduction."""

import numpy as np
import pytest

from practice_bus.errors import FeatureError
from practice_bus.features.pca import fit_pca


@pytest.fixture
def wide(rng):
    """Few samples of high dimension with a dominant direction."""
    base = rng.normal(size=(20, 500))
    base[:, 0] *= 10.0
    return base


@pytest.mark.unit
class TestFitPca:
    """Test the Gram-trick PCA fit"""

    def test_orthonormal_columns(self, wide):
        """Test the basis columns are orthonormal"""
        pca = fit_pca(wide, k=10)

        gram = pca.basis.T @ pca.basis
        assert np.abs(gram - np.eye(pca.rank)).max() < 1e-8

    def test_matches_covariance_eigenvalues(self, rng):
        """Test eigenvalues against the direct covariance decomposition"""
        x = rng.normal(size=(40, 6)) @ rng.normal(size=(6, 6))

        pca = fit_pca(x, k=3)

        expected = np.sort(np.linalg.eigvalsh(np.cov(x, rowvar=False)))[::-1][:3]
        np.testing.assert_allclose(pca.eigenvalues, expected, rtol=1e-9)
        projected = pca.project(x)
        np.testing.assert_allclose(projected.var(axis=0, ddof=1), expected, rtol=1e-9)

    def test_descending_variance(self, wide):
        """Test components are ordered by explained variance"""
        pca = fit_pca(wide, k=10)

        assert np.all(np.diff(pca.eigenvalues) <= 0)
        assert 0 < pca.explained_variance_ratio().sum() <= 1.0

    def test_sign_convention(self, wide):
        """Test the largest-magnitude entry of every column is positive"""
        pca = fit_pca(wide, k=5)

        peaks = pca.basis[np.argmax(np.abs(pca.basis), axis=0), np.arange(pca.rank)]
        assert np.all(peaks > 0)

    def test_rank_deficient_padding(self, rng):
        """Test fewer samples than components pads projections with zeros"""
        x = rng.normal(size=(5, 30))

        pca = fit_pca(x, k=10)
        coords = pca.project(x)

        assert pca.rank == 4
        assert coords.shape == (5, 10)
        np.testing.assert_array_equal(coords[:, 4:], 0.0)

    def test_full_rank_reconstruction(self, rng):
        """Test the fit set reconstructs exactly when nothing is dropped"""
        x = rng.normal(size=(6, 30))

        pca = fit_pca(x, k=10)

        np.testing.assert_allclose(pca.reconstruct(pca.project(x)), x, atol=1e-9)

    def test_single_vector_projection(self, wide):
        """Test projecting one vector"""
        pca = fit_pca(wide, k=7, behavior="switch-on")

        assert pca.project(wide[0]).shape == (7,)
        assert pca.behavior == "switch-on"


@pytest.mark.unit
class TestPcaErrors:
    """Test rejected PCA inputs"""

    def test_one_vector(self):
        """Test that a single vector can't be fitted"""
        with pytest.raises(FeatureError, match="at least two"):
            fit_pca(np.ones((1, 5)))

    def test_identical_vectors(self):
        """Test zero variance input"""
        with pytest.raises(FeatureError, match="zero variance"):
            fit_pca(np.ones((4, 5)))

    def test_non_finite(self):
        """Test NaN input"""
        x = np.arange(10.0).reshape(2, 5)
        x[1, 2] = np.nan

        with pytest.raises(FeatureError, match="non-finite"):
            fit_pca(x)

    def test_dimension_mismatch(self, rng):
        """Test projecting vectors of the wrong size"""
        pca = fit_pca(rng.normal(size=(5, 8)), k=2)

        with pytest.raises(FeatureError, match="expected 8-d"):
            pca.project(np.zeros(9))
