"""
Synthetic planar scenes and sensor capture.

A scene is the wall plane Y = 0 with a procedural texture and the device
painted on it. ``capture`` ray-casts every pixel onto that plane to produce
the RGB image and a registered point cloud, the way an RGB-D head would.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from practice_bus.config import ScenarioConfig
from practice_bus.errors import SceneError
from practice_bus.sim.camera import PinholeCamera
from practice_bus.sim.devices import Primitive, SimDevice
from practice_bus.sim.geometry import Pose2
from practice_bus.sim.texture import PrimitiveTexture, WallTexture

logger = logging.getLogger(__name__)

ROOM_RGB = np.array([88.0, 90.0, 96.0])


@lru_cache(maxsize=8)
def wall_texture(seed: int, width: float, height: float) -> WallTexture:
    return WallTexture(seed, width, height)


@dataclass(frozen=True, eq=False)
class SceneModel:
    """Immutable textured wall with the device drawn in one state."""

    config: ScenarioConfig
    device_kind: str
    device_center: np.ndarray
    state: bool
    primitives: tuple[Primitive, ...]
    illumination: float
    wall: WallTexture
    device_texture: PrimitiveTexture

    def albedo(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        """Unlit surface color at wall coordinates, shape (..., 3)."""
        rgb = self.wall.albedo(x, z)
        dx = x - self.device_center[0]
        dz = z - self.device_center[2]
        for primitive in self.primitives:
            inside = primitive.box.contains(dx, dz)
            if np.any(inside):
                rgb[inside] = self.device_texture.shade(
                    np.asarray(primitive.rgb), dx[inside], dz[inside]
                )
        return rgb

    def device_mask(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        dx = x - self.device_center[0]
        dz = z - self.device_center[2]
        mask = np.zeros(np.shape(x), dtype=bool)
        for primitive in self.primitives:
            mask |= primitive.box.contains(dx, dz)
        return mask


def generate_scene(config: ScenarioConfig, device: SimDevice) -> SceneModel:
    """
    Build the scene for the device's current state.

    Raises:
        SceneError: the device is off the wall plane or does not fit on the wall
    """
    scene_cfg = config.scene
    center = device.center
    if abs(center[1]) > 1e-9:
        raise SceneError(f"device must sit on the wall plane y=0, got y={center[1]:.4f}")
    hx, hz = device.half_extent()
    if (
        center[0] - hx < 0
        or center[0] + hx > scene_cfg.wall_width
        or center[2] - hz < 0
        or center[2] + hz > scene_cfg.wall_height
    ):
        raise SceneError(
            f"device at ({center[0]:.3f}, {center[2]:.3f}) does not fit on the "
            f"{scene_cfg.wall_width} x {scene_cfg.wall_height} m wall"
        )

    lit = device.illuminates and device.state
    return SceneModel(
        config=config,
        device_kind=device.kind,
        device_center=center.copy(),
        state=device.state,
        primitives=tuple(device.primitives(device.state)),
        illumination=scene_cfg.illumination_gain if lit else 1.0,
        wall=wall_texture(scene_cfg.texture_seed, scene_cfg.wall_width, scene_cfg.wall_height),
        device_texture=PrimitiveTexture(device.half_extent()),
    )


@dataclass(frozen=True, eq=False)
class Observation:
    """
    One registered RGB image and point cloud.

    Attributes:
        rgb: (H, W, 3) uint8 image
        points: (N, 3) world points on the wall
        pixels: (N, 2) integer (u, v) of each point; u is the column
        camera: camera that took the image
        brightness: scene illumination level in [0, 1]
    """

    rgb: np.ndarray
    points: np.ndarray
    pixels: np.ndarray
    camera: PinholeCamera
    brightness: float

    def __len__(self) -> int:
        return len(self.points)

    def mean_intensity(self) -> float:
        return float(self.rgb.mean())

    def nearest_index(self, point: np.ndarray) -> int:
        """Index of the cloud point closest to ``point`` (lowest index on ties)."""
        return int(np.argmin(np.sum((self.points - np.asarray(point)) ** 2, axis=1)))


def make_camera(config: ScenarioConfig, pose: Pose2) -> PinholeCamera:
    scene_cfg = config.scene
    return PinholeCamera.from_pose(
        pose,
        scene_cfg.camera_height,
        scene_cfg.focal_length,
        scene_cfg.principal_point,
        (scene_cfg.image_height, scene_cfg.image_width),
    )


def capture(scene: SceneModel, pose: Pose2, config: ScenarioConfig) -> Observation:
    """
    Render the image seen from ``pose`` and its registered cloud.

    Raises:
        SceneError: the device center is outside the camera frustum
    """
    camera = make_camera(config, pose)
    u, v, depth = camera.project(scene.device_center)
    if not camera.contains(u, v, depth)[0]:
        raise SceneError(f"device is outside the camera frustum from pose {pose}")

    scene_cfg = config.scene
    rows, cols = scene_cfg.image_height, scene_cfg.image_width
    vv, uu = np.mgrid[0:rows, 0:cols]
    dirs = camera.rays(uu, vv)
    origin = camera.center

    toward_wall = dirs[..., 1] < -1e-12
    t = np.where(toward_wall, -origin[1] / np.where(toward_wall, dirs[..., 1], -1.0), 0.0)
    hit = origin + t[..., None] * dirs
    hit[..., 1] = 0.0
    on_wall = (
        toward_wall
        & (hit[..., 0] >= 0)
        & (hit[..., 0] <= scene_cfg.wall_width)
        & (hit[..., 2] >= 0)
        & (hit[..., 2] <= scene_cfg.wall_height)
    )

    albedo = np.broadcast_to(ROOM_RGB, (rows, cols, 3)).copy()
    albedo[on_wall] = scene.albedo(hit[..., 0][on_wall], hit[..., 2][on_wall])
    rgb = np.clip(np.rint(albedo * scene.illumination), 0, 255).astype(np.uint8)

    stride = scene_cfg.cloud_stride
    registered = on_wall & (uu % stride == 0) & (vv % stride == 0)
    points = hit[registered]
    pixels = np.stack([uu[registered], vv[registered]], axis=1).astype(np.int64)

    return Observation(
        rgb=rgb,
        points=points,
        pixels=pixels,
        camera=camera,
        brightness=scene.illumination / scene_cfg.illumination_gain,
    )
