"""
Pinhole camera mounted on the mobile base.

Camera frame: x right, y down, z forward (optical axis). The camera looks
horizontally along the base heading; pixel centers sit at integer (u, v).
"""

import math
from dataclasses import dataclass

import numpy as np

from practice_bus.sim.geometry import Pose2


@dataclass(frozen=True, eq=False)
class PinholeCamera:
    focal_length: float
    cx: float
    cy: float
    width: int
    height: int
    position: tuple[float, float, float]
    heading: float

    @classmethod
    def from_pose(
        cls,
        pose: Pose2,
        height_m: float,
        focal_length: float,
        principal_point: tuple[float, float],
        image_size: tuple[int, int],
    ) -> "PinholeCamera":
        rows, cols = image_size
        return cls(
            focal_length=focal_length,
            cx=principal_point[0],
            cy=principal_point[1],
            width=cols,
            height=rows,
            position=(pose.x, pose.y, height_m),
            heading=pose.heading,
        )

    @property
    def rotation(self) -> np.ndarray:
        """World-to-camera rotation; rows are the camera axes in world coordinates."""
        s, c = math.sin(self.heading), math.cos(self.heading)
        return np.array(
            [
                [s, -c, 0.0],  # right
                [0.0, 0.0, -1.0],  # down
                [c, s, 0.0],  # forward
            ]
        )

    @property
    def center(self) -> np.ndarray:
        return np.asarray(self.position, dtype=float)

    def extrinsic(self) -> np.ndarray:
        """4x4 rigid transform mapping world points into the camera frame."""
        transform = np.eye(4)
        rot = self.rotation
        transform[:3, :3] = rot
        transform[:3, 3] = -rot @ self.center
        return transform

    def to_camera(self, points: np.ndarray) -> np.ndarray:
        return (np.asarray(points, dtype=float) - self.center) @ self.rotation.T

    def project(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Project world points.

        Returns:
            (u, v, depth) arrays; u is the column, v the row.
        """
        cam = self.to_camera(np.atleast_2d(points))
        depth = cam[:, 2]
        u = self.focal_length * cam[:, 0] / depth + self.cx
        v = self.focal_length * cam[:, 1] / depth + self.cy
        return u, v, depth

    def back_project(self, u: np.ndarray, v: np.ndarray, depth: np.ndarray) -> np.ndarray:
        """World points at camera depth ``depth`` behind pixels (u, v)."""
        u, v, depth = np.broadcast_arrays(
            np.asarray(u, dtype=float), np.asarray(v, dtype=float), np.asarray(depth, dtype=float)
        )
        cam = np.stack(
            [
                (u - self.cx) / self.focal_length * depth,
                (v - self.cy) / self.focal_length * depth,
                depth,
            ],
            axis=-1,
        )
        return cam @ self.rotation + self.center

    def rays(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """World-frame ray directions (unit depth along the optical axis) for pixels."""
        return self.back_project(u, v, np.ones_like(np.asarray(u, dtype=float))) - self.center

    def contains(self, u: np.ndarray, v: np.ndarray, depth: np.ndarray) -> np.ndarray:
        """Whether projected coordinates fall on a pixel of the image."""
        return (
            (depth > 0)
            & (u >= -0.5)
            & (u < self.width - 0.5)
            & (v >= -0.5)
            & (v < self.height - 0.5)
        )
