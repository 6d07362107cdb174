"""Tests for multi-scale patch vectors."""

import numpy as np
import pytest

from practice_bus.features.patches import (
    PatchSpec,
    area_matrix,
    extract_patch_matrix,
    extract_patch_vector,
)
from tests.oracles import padded_patch

SMALL = PatchSpec(widths=(5, 9, 15), target=5)


@pytest.fixture
def image(rng):
    return rng.integers(0, 256, size=(40, 50, 3), dtype=np.uint8)


@pytest.mark.unit
class TestPatchSpec:
    """Test patch layout parameters"""

    def test_default_vector_length(self):
        """Test four 31x31 RGB scales"""
        spec = PatchSpec()

        assert spec.vector_length == 4 * 31 * 31 * 3 == 11532
        assert spec.max_width == 321

    def test_even_width_rejected(self):
        """Test that patches need a center pixel"""
        with pytest.raises(ValueError, match="odd"):
            PatchSpec(widths=(40, 81))

    def test_width_below_target_rejected(self):
        """Test that patches are never upsampled"""
        with pytest.raises(ValueError, match="at least"):
            PatchSpec(widths=(21,), target=31)


@pytest.mark.unit
class TestAreaMatrix:
    """Test the box-averaging weights"""

    @pytest.mark.parametrize("width, target", [(41, 31), (81, 31), (9, 5), (31, 31)])
    def test_rows_sum_to_one(self, width, target):
        """Test every output bin is a weighted average"""
        matrix = area_matrix(width, target)

        assert matrix.shape == (target, width)
        np.testing.assert_allclose(matrix.sum(axis=1), 1.0)
        np.testing.assert_allclose(matrix.sum(axis=0), target / width)

    def test_same_size_is_identity(self):
        """Test no resampling when the width equals the target"""
        np.testing.assert_allclose(area_matrix(7, 7), np.eye(7))


@pytest.mark.unit
class TestExtract:
    """Test patch extraction against an edge-padded reference"""

    @pytest.mark.parametrize("pixel", [(25, 20), (0, 0), (49, 39), (3, 37), (47, 1)])
    def test_matches_padded_reference(self, image, pixel):
        """Test interior and border pixels, including corners"""
        vector = extract_patch_vector(image, pixel, SMALL)

        expected = padded_patch(image, pixel, SMALL.widths, SMALL.target)
        np.testing.assert_allclose(vector, expected, atol=1e-9)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(10))
    def test_default_scales_match_padded_reference(self, seed):
        """Test 100 random pixels per seed with the full-size scales"""
        rng = np.random.default_rng(seed)
        image = rng.integers(0, 256, size=(120, 160, 3), dtype=np.uint8)
        pixels = np.column_stack([rng.integers(0, 160, 100), rng.integers(0, 120, 100)])
        spec = PatchSpec()

        matrix = extract_patch_matrix(image, pixels, spec)

        for row, (u, v) in enumerate(pixels):
            expected = padded_patch(image, (int(u), int(v)), spec.widths, spec.target)
            np.testing.assert_allclose(matrix[row], expected, atol=1e-9)

    def test_constant_image(self):
        """Test that a flat image gives a flat vector"""
        flat = np.full((30, 30, 3), 77, dtype=np.uint8)

        vector = extract_patch_vector(flat, (0, 29), SMALL)

        assert vector.shape == (SMALL.vector_length,)
        np.testing.assert_allclose(vector, 77.0)

    def test_rgb_interleaved(self):
        """Test each pixel's channels stay adjacent in the vector"""
        image = np.zeros((20, 20, 3), dtype=np.uint8)
        image[..., 1] = 100
        image[..., 2] = 200

        vector = extract_patch_vector(image, (10, 10), SMALL)

        np.testing.assert_allclose(vector[:6], [0.0, 100.0, 200.0, 0.0, 100.0, 200.0])

    def test_smallest_scale_first(self, image):
        """Test scales are concatenated small to large"""
        spec = PatchSpec(widths=(5, 15), target=5)
        vector = extract_patch_vector(image, (25, 20), spec)

        small_only = extract_patch_vector(image, (25, 20), PatchSpec(widths=(5,), target=5))
        np.testing.assert_allclose(vector[: len(small_only)], small_only)

    def test_matrix_stacks_vectors(self, image):
        """Test extracting several pixels at once"""
        pixels = np.array([[1, 2], [30, 15], [49, 39]])

        matrix = extract_patch_matrix(image, pixels, SMALL)

        assert matrix.shape == (3, SMALL.vector_length)
        for row, pixel in enumerate(pixels):
            np.testing.assert_allclose(matrix[row], extract_patch_vector(image, pixel, SMALL))
