"""Candidate sampling, multi-scale patches and PCA feature vectors."""

from practice_bus.features.patches import PatchSpec, extract_patch_matrix, extract_patch_vector
from practice_bus.features.pca import PcaBasis, fit_pca
from practice_bus.features.pipeline import FeatureExtractor, FeatureSet
from practice_bus.features.sampling import SamplerParams, sample_candidates

__all__ = [
    "FeatureExtractor",
    "FeatureSet",
    "PatchSpec",
    "PcaBasis",
    "SamplerParams",
    "extract_patch_matrix",
    "extract_patch_vector",
    "fit_pca",
    "sample_candidates",
]
