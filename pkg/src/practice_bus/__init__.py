"""
Practice Bus - autonomous practice of complementary manipulation behaviors.

A simulated robot repeatedly approaches a wall device (light switch, rocker
switch, drawer), executes a behavior and its complement, labels each try with
a verification function and actively learns where on the image each behavior
succeeds. Training components report through the Bus; nothing couples them
directly.
"""

from practice_bus._version import __version__
from practice_bus.config import ScenarioConfig, load_scenario, standard_scenario
from practice_bus.core.bus import PracticeBus
from practice_bus.core.events import EventMetadata, ModuleStatus, PracticeEvent
from practice_bus.core.module import PracticeModule
from practice_bus.errors import (
    ConfigError,
    ConvergenceError,
    FeatureError,
    FormatError,
    GridSearchError,
    InitializationError,
    PracticeBusError,
    SceneError,
    TrainingDataError,
    VerificationError,
)
from practice_bus.training.trace import TraceRecorder
from practice_bus.training.trainer import PairTrainer

__all__ = [
    "__version__",
    "ConfigError",
    "ConvergenceError",
    "EventMetadata",
    "FeatureError",
    "FormatError",
    "GridSearchError",
    "InitializationError",
    "ModuleStatus",
    "PairTrainer",
    "PracticeBus",
    "PracticeBusError",
    "PracticeEvent",
    "PracticeModule",
    "ScenarioConfig",
    "SceneError",
    "TraceRecorder",
    "TrainingDataError",
    "VerificationError",
    "load_scenario",
    "standard_scenario",
]
