"""
Scenario configuration.

A scenario file is YAML with a mandatory ``version`` and one mapping per
section::

    version: 1
    name: light-switch
    scene:    {kind: wall-switch, texture_seed: 7, ...}
    device:   {placement: [1.5, 0.0, 1.2], ...}
    verifier: {kind: intensity-diff, threshold: 10.0}
    noise:    {std_x: 0.0185, std_y: 0.0179}
    robot:    {standoff: 0.6}
    learner:  {seed_point: [1.5, 0.0, 1.2], ...}

World frame: X runs along the wall, Y points out of the wall into the room,
Z is up. The wall surface is the plane Y = 0.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from practice_bus.errors import ConfigError
from practice_bus.sim.geometry import Pose2

logger = logging.getLogger(__name__)

SCENARIO_VERSION = 1
MIN_IMAGE_SIDE = 321 + 1

SCENE_KINDS = ("wall-switch", "rocker", "drawer")
DEVICE_FOR_SCENE = {"wall-switch": "light-switch", "rocker": "rocker", "drawer": "drawer"}
VERIFIER_KINDS = ("oracle", "intensity-diff", "displacement")

# Point-ahead dispersion measured for two navigation goals (x, y std in m)
NOISE_PRESETS: dict[str, tuple[float, float]] = {
    "pose-a": (0.0185, 0.0179),
    "pose-b": (0.0155, 0.0238),
}

STANDARD_SCENARIOS = ("light_switch", "rocker", "drawer")


@dataclass(frozen=True)
class SceneConfig:
    kind: str
    texture_seed: int = 0
    wall_width: float = 3.0
    wall_height: float = 2.4
    image_height: int = 480
    image_width: int = 640
    focal_length: float = 800.0
    principal_point: tuple[float, float] = (319.5, 239.5)
    camera_height: float = 1.2
    cloud_stride: int = 2
    illumination_gain: float = 1.25

    def __post_init__(self) -> None:
        if self.kind not in SCENE_KINDS:
            raise ConfigError(f"scene.kind must be one of {SCENE_KINDS}, got {self.kind!r}")
        if min(self.image_height, self.image_width) < MIN_IMAGE_SIDE:
            raise ConfigError(
                f"image must be at least {MIN_IMAGE_SIDE}x{MIN_IMAGE_SIDE} px, "
                f"got {self.image_height}x{self.image_width}"
            )
        if self.focal_length <= 0:
            raise ConfigError("scene.focal_length must be positive")
        if self.wall_width <= 0 or self.wall_height <= 0:
            raise ConfigError("wall extent must be positive")
        if self.cloud_stride < 1:
            raise ConfigError("scene.cloud_stride must be >= 1")
        if self.illumination_gain < 1.0:
            raise ConfigError("scene.illumination_gain must be >= 1")


@dataclass(frozen=True)
class DeviceConfig:
    placement: tuple[float, float, float]
    initial_state: bool = False
    label_noise: float = 0.0
    noise_shell: float = 0.005
    drawer_travel: float = 0.15

    def __post_init__(self) -> None:
        if len(self.placement) != 3:
            raise ConfigError("device.placement must be a 3D point")
        if not 0.0 <= self.label_noise <= 1.0:
            raise ConfigError("device.label_noise must be a probability")
        if self.noise_shell < 0 or self.drawer_travel <= 0:
            raise ConfigError("device.noise_shell must be >= 0 and drawer_travel > 0")


@dataclass(frozen=True)
class VerifierConfig:
    kind: str = "intensity-diff"
    threshold: float = 10.0
    min_travel: float = 0.10

    def __post_init__(self) -> None:
        if self.kind not in VERIFIER_KINDS:
            raise ConfigError(f"verifier.kind must be one of {VERIFIER_KINDS}")
        if self.threshold < 0 or self.min_travel < 0:
            raise ConfigError("verifier thresholds must be >= 0")


@dataclass(frozen=True)
class NoiseConfig:
    std_x: float = 0.0185
    std_y: float = 0.0179
    lookahead: float = 0.5
    heading_share: float = 0.5

    def __post_init__(self) -> None:
        if self.std_x < 0 or self.std_y < 0:
            raise ConfigError("pose noise stds must be >= 0")
        if self.lookahead <= 0:
            raise ConfigError("noise.lookahead must be positive")
        if not 0.0 <= self.heading_share <= 1.0:
            raise ConfigError("noise.heading_share must be within [0, 1]")

    @classmethod
    def preset(cls, name: str, **overrides: Any) -> "NoiseConfig":
        try:
            std_x, std_y = NOISE_PRESETS[name]
        except KeyError:
            raise ConfigError(f"unknown noise preset {name!r}") from None
        return cls(std_x=std_x, std_y=std_y, **overrides)


@dataclass(frozen=True)
class PracticePoseConfig:
    pose: Pose2
    noise: str | None = None

    def __post_init__(self) -> None:
        if self.noise is not None and self.noise not in NOISE_PRESETS:
            raise ConfigError(f"unknown noise preset {self.noise!r}")


@dataclass(frozen=True)
class RobotConfig:
    standoff: float = 0.6
    nominal_pose: Pose2 | None = None
    practice_poses: tuple[PracticePoseConfig, ...] = ()
    practice_radius: float = 1.2

    def __post_init__(self) -> None:
        if self.standoff <= 0:
            raise ConfigError("robot.standoff must be positive")
        if self.practice_poses and len(self.practice_poses) != 8:
            raise ConfigError("robot.practice_poses needs exactly eight entries")


@dataclass(frozen=True)
class LearnerConfig:
    seed_point: tuple[float, float, float]
    sampler_variance: tuple[float, float, float] = (0.0016, 0.0016, 0.0016)
    candidates: int = 200
    pca_components: int = 50
    init_sigma: float = 0.02
    init_max_iterations: int = 50
    visit_budget: int = 6
    label_cap: int = 300
    gamma: float | None = None
    c_negative: float = 1.0
    solver_tol: float = 1e-3
    solver_max_iterations: int = 100_000
    kde_bandwidth: str | float = "scott"
    kde_grid_step: float = 0.005
    retry_attempts: int = 10
    heatmap_stride: int = 4
    execution_stride: int = 4

    def __post_init__(self) -> None:
        if len(self.seed_point) != 3:
            raise ConfigError("learner.seed_point must be a 3D point")
        if len(self.sampler_variance) != 3 or min(self.sampler_variance) <= 0:
            raise ConfigError("learner.sampler_variance needs three positive variances")
        if self.candidates < 1 or self.pca_components < 1:
            raise ConfigError("learner.candidates and pca_components must be >= 1")
        if self.init_sigma <= 0 or self.init_max_iterations < 1:
            raise ConfigError("learner.init_sigma must be > 0 and init_max_iterations >= 1")
        if not 1 <= self.visit_budget <= 6:
            raise ConfigError("learner.visit_budget must be within [1, 6]")
        if self.gamma is not None and self.gamma <= 0:
            raise ConfigError("learner.gamma must be positive")
        if self.c_negative <= 0 or self.solver_tol <= 0:
            raise ConfigError("learner.c_negative and solver_tol must be positive")
        strides = min(self.heatmap_stride, self.execution_stride)
        if self.label_cap < 2 or self.retry_attempts < 1 or strides < 1:
            raise ConfigError("learner caps must be positive")
        if isinstance(self.kde_bandwidth, str) and self.kde_bandwidth not in ("scott", "silverman"):
            raise ConfigError("learner.kde_bandwidth must be 'scott', 'silverman' or a number")


@dataclass(frozen=True)
class ScenarioConfig:
    """A complete, validated scenario."""

    name: str
    scene: SceneConfig
    device: DeviceConfig
    learner: LearnerConfig
    verifier: VerifierConfig = field(default_factory=VerifierConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    robot: RobotConfig = field(default_factory=RobotConfig)
    version: int = SCENARIO_VERSION

    @property
    def device_kind(self) -> str:
        return DEVICE_FOR_SCENE[self.scene.kind]

    @property
    def device_center(self) -> tuple[float, float, float]:
        return self.device.placement

    def nominal_pose(self) -> Pose2:
        """Stored base pose in front of the device, looking at the wall."""
        if self.robot.nominal_pose is not None:
            return self.robot.nominal_pose
        x, _, _ = self.device.placement
        return Pose2(x, self.robot.standoff, -math.pi / 2)

    def practice_poses(self) -> tuple[PracticePoseConfig, ...]:
        """Eight practice poses; a half ring around the device when not configured."""
        if self.robot.practice_poses:
            return self.robot.practice_poses
        cx, _, _ = self.device.placement
        radius = self.robot.practice_radius
        poses = []
        for k in range(8):
            angle = math.pi * (k + 0.5) / 8
            x, y = cx + radius * math.cos(angle), radius * math.sin(angle)
            preset = "pose-a" if k % 2 == 0 else "pose-b"
            poses.append(PracticePoseConfig(Pose2.facing(x, y, cx, 0.0), preset))
        return tuple(poses)

    def noise_for(self, pose_index: int) -> NoiseConfig:
        """Approach noise used when returning from a practice pose."""
        preset = self.practice_poses()[pose_index].noise
        if preset is None:
            return self.noise
        return NoiseConfig.preset(
            preset, lookahead=self.noise.lookahead, heading_share=self.noise.heading_share
        )

    def replace(self, **sections: Any) -> "ScenarioConfig":
        return dataclasses.replace(self, **sections)

    def to_dict(self) -> dict[str, Any]:
        """Plain mapping that ``scenario_from_dict`` turns back into this config."""
        data = _plain(dataclasses.asdict(self))
        data["robot"]["nominal_pose"] = (
            self.robot.nominal_pose.as_list() if self.robot.nominal_pose else None
        )
        data["robot"]["practice_poses"] = [
            {"pose": p.pose.as_list(), "noise": p.noise} for p in self.robot.practice_poses
        ]
        return data


def _plain(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [_plain(v) for v in value]
    return value


def _section(cls: type, raw: Any, where: str, **converted: Any) -> Any:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"section {where!r} must be a mapping")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(raw) - names)
    if unknown:
        raise ConfigError(f"unknown keys in {where!r}: {', '.join(unknown)}")
    kwargs = {k: tuple(v) if isinstance(v, list) else v for k, v in raw.items()}
    kwargs.update(converted)
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise ConfigError(f"section {where!r}: {e}") from e


def _pose(raw: Any, where: str) -> Pose2:
    if not isinstance(raw, list | tuple) or len(raw) != 3:
        raise ConfigError(f"{where} must be [x, y, heading]")
    return Pose2(*(float(v) for v in raw))


def _robot(raw: Any) -> RobotConfig:
    raw = dict(raw or {})
    converted: dict[str, Any] = {}
    if raw.get("nominal_pose") is not None:
        converted["nominal_pose"] = _pose(raw["nominal_pose"], "robot.nominal_pose")
    poses = raw.pop("practice_poses", None) or []
    parsed = []
    for i, entry in enumerate(poses):
        if isinstance(entry, dict):
            parsed.append(
                PracticePoseConfig(
                    _pose(entry.get("pose"), f"robot.practice_poses[{i}]"), entry.get("noise")
                )
            )
        else:
            parsed.append(PracticePoseConfig(_pose(entry, f"robot.practice_poses[{i}]")))
    converted["practice_poses"] = tuple(parsed)
    raw.pop("nominal_pose", None)
    return _section(RobotConfig, raw, "robot", **converted)


def scenario_from_dict(data: Any) -> ScenarioConfig:
    """Validate a parsed scenario mapping."""
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a mapping")
    version = data.get("version")
    if version != SCENARIO_VERSION:
        raise ConfigError(f"unsupported scenario version {version!r} (expected {SCENARIO_VERSION})")
    known = {"version", "name", "scene", "device", "verifier", "noise", "robot", "learner"}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown top-level keys: {', '.join(unknown)}")
    for required in ("scene", "device", "learner"):
        if required not in data:
            raise ConfigError(f"missing section {required!r}")

    scene = _section(SceneConfig, data["scene"], "scene")
    device = _section(DeviceConfig, data["device"], "device")
    learner_raw = dict(data["learner"] or {})
    if isinstance(learner_raw.get("kde_bandwidth"), int):
        learner_raw["kde_bandwidth"] = float(learner_raw["kde_bandwidth"])
    learner = _section(LearnerConfig, learner_raw, "learner")
    return ScenarioConfig(
        name=str(data.get("name", scene.kind)),
        scene=scene,
        device=device,
        learner=learner,
        verifier=_section(VerifierConfig, data.get("verifier"), "verifier"),
        noise=_section(NoiseConfig, data.get("noise"), "noise"),
        robot=_robot(data.get("robot")),
        version=version,
    )


def load_scenario(path: str | Path) -> ScenarioConfig:
    """
    Load a scenario file.

    ``standard:<name>`` loads one of the scenarios shipped with the package.
    """
    text = str(path)
    if text.startswith("standard:"):
        return standard_scenario(text.split(":", 1)[1])
    try:
        raw = yaml.safe_load(Path(path).read_text())
    except OSError as e:
        raise ConfigError(f"cannot read scenario {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"scenario {path} is not valid YAML: {e}") from e
    config = scenario_from_dict(raw)
    logger.debug(f"📄 Loaded scenario {config.name!r} from {path}")
    return config


def standard_scenario(name: str) -> ScenarioConfig:
    """One of the packaged scenarios: light_switch, rocker or drawer."""
    key = name.replace("-", "_")
    if key not in STANDARD_SCENARIOS:
        raise ConfigError(f"unknown standard scenario {name!r}; choose from {STANDARD_SCENARIOS}")
    text = resources.files("practice_bus.scenarios").joinpath(f"{key}.yaml").read_text()
    return scenario_from_dict(yaml.safe_load(text))


def dump_scenario(config: ScenarioConfig) -> str:
    return yaml.safe_dump(config.to_dict(), sort_keys=True)
