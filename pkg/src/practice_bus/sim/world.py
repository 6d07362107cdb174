"""
The simulated world the robot acts in.

Binds a scenario's device, scene rendering, verifier and the current base
pose, and runs one behavior trial at a time: execute, re-capture, verify.
"""

import logging
from dataclasses import dataclass

import numpy as np

from practice_bus.config import NoiseConfig, ScenarioConfig
from practice_bus.sim.devices import Behavior, BehaviorOutcome, SimDevice, build_device
from practice_bus.sim.geometry import Pose2
from practice_bus.sim.navigation import sample_approach_pose
from practice_bus.sim.scene import Observation, SceneModel, capture, generate_scene
from practice_bus.sim.verify import Transition, Verifier

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Trial:
    """One behavior execution with its sensing and verifier label."""

    outcome: BehaviorOutcome
    before: Observation
    after: Observation
    success: bool


class SimWorld:
    def __init__(
        self,
        config: ScenarioConfig,
        device_rng: np.random.Generator | None = None,
        device: SimDevice | None = None,
    ):
        self.config = config
        self.device = device if device is not None else build_device(config, device_rng)
        self.verifier = Verifier.from_config(config.verifier)
        self.nominal_pose = config.nominal_pose()
        self.pose = self.nominal_pose
        self._scenes: dict[bool, SceneModel] = {}

    def scene(self) -> SceneModel:
        """Scene for the current device state; scenes are pure so they are cached."""
        state = self.device.state
        if state not in self._scenes:
            self._scenes[state] = generate_scene(self.config, self.device)
        return self._scenes[state]

    def move_to(self, pose: Pose2) -> None:
        self.pose = pose

    def approach(self, rng: np.random.Generator, noise: NoiseConfig | None = None) -> Pose2:
        """Drive back to the stored device pose, arriving with navigation error."""
        self.pose = sample_approach_pose(self.nominal_pose, noise or self.config.noise, rng)
        logger.debug(
            f"🚗 Approached ({self.pose.x:.4f}, {self.pose.y:.4f}, {self.pose.heading:.4f})"
        )
        return self.pose

    def observe(self) -> Observation:
        return capture(self.scene(), self.pose, self.config)

    def act(self, which: Behavior, point: np.ndarray, before: Observation) -> Trial:
        """Execute ``which`` at ``point`` and label it with the verifier."""
        outcome = self.device.execute(which, point)
        after = self.observe()
        success = self.verifier(before, after, Transition(outcome.success, outcome.travel))
        return Trial(outcome, before, after, success)
