"""Planar robot poses and angle helpers."""

import math
from dataclasses import dataclass

import numpy as np


def wrap_angle(angle: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped = math.pi
    return wrapped


@dataclass(frozen=True)
class Pose2:
    """
    2D mobile base pose in the world frame.

    Attributes:
        x: meters along the wall
        y: meters out from the wall into the room
        heading: radians, normalized to (-pi, pi]
    """

    x: float
    y: float
    heading: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "heading", wrap_angle(float(self.heading)))

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])

    @property
    def forward(self) -> np.ndarray:
        return np.array([math.cos(self.heading), math.sin(self.heading)])

    def point_ahead(self, distance: float) -> np.ndarray:
        """XY location ``distance`` meters in front of the base."""
        return self.position + distance * self.forward

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.heading]

    @classmethod
    def facing(cls, x: float, y: float, target_x: float, target_y: float) -> "Pose2":
        """Pose at (x, y) looking at (target_x, target_y)."""
        return cls(x, y, math.atan2(target_y - y, target_x - x))
