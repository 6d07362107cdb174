"""
Pytest configuration and shared fixtures for practice_bus tests

This file is automatically loaded by pytest and provides
shared fixtures and configuration for all tests.
"""

import dataclasses
import sys
from pathlib import Path

# Add src to path so tests can import practice_bus
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import numpy as np
import pytest

from practice_bus.config import ScenarioConfig, standard_scenario
from practice_bus.core.bus import PracticeBus
from practice_bus.features.patches import PatchSpec
from practice_bus.features.pipeline import FeatureExtractor

# three small scales keep patch extraction cheap in end-to-end tests
FAST_PATCHES = PatchSpec(widths=(11, 21, 41), target=7)


@pytest.fixture
def fresh_bus():
    """
    Provide a fresh Bus instance for each test.

    Resets the singleton to ensure test isolation.
    Each test gets a clean Bus with no handlers or events.
    """
    bus = PracticeBus.reset()
    yield bus
    bus.clear_event_log()


@pytest.fixture
def bus_with_debug(fresh_bus):
    """Provide a Bus with debug mode enabled."""
    fresh_bus.set_debug(True)
    return fresh_bus


@pytest.fixture
def rng():
    """Seeded generator; every test that draws gets the same numbers."""
    return np.random.default_rng(12345)


def small_scenario(name: str = "light_switch", **learner: object) -> ScenarioConfig:
    """
    A packaged scenario shrunk for tests: smaller image, sparser cloud,
    fewer candidates and components.
    """
    base = standard_scenario(name)
    scene = dataclasses.replace(
        base.scene,
        image_height=360,
        image_width=480,
        principal_point=(239.5, 179.5),
        cloud_stride=3,
    )
    options = {"candidates": 60, "pca_components": 12, **learner}
    return base.replace(scene=scene, learner=dataclasses.replace(base.learner, **options))


@pytest.fixture
def light_switch() -> ScenarioConfig:
    return small_scenario("light_switch")


@pytest.fixture
def rocker() -> ScenarioConfig:
    return small_scenario("rocker")


@pytest.fixture
def drawer() -> ScenarioConfig:
    return small_scenario("drawer")


@pytest.fixture
def fast_extractor() -> FeatureExtractor:
    return FeatureExtractor(FAST_PATCHES)
