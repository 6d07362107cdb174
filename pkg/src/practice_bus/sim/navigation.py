"""Navigation error model for approaching a stored base pose."""

import math

import numpy as np

from practice_bus.config import NoiseConfig
from practice_bus.sim.geometry import Pose2


def sample_approach_pose(nominal: Pose2, noise: NoiseConfig, rng: np.random.Generator) -> Pose2:
    """
    Perturb a stored pose the way repeated navigation does.

    The point ``noise.lookahead`` meters ahead of the base is displaced by
    zero-mean Gaussian noise with std (std_x, std_y) in world axes. A share
    ``noise.heading_share`` of the lateral part of that displacement comes
    from rotating the base, the rest from translating it; either way the
    point ahead lands exactly on the sampled location.
    """
    if noise.std_x == 0 and noise.std_y == 0:
        return nominal

    delta = rng.normal(0.0, 1.0, size=2) * np.array([noise.std_x, noise.std_y])
    length = noise.lookahead
    forward = nominal.forward
    left = np.array([-forward[1], forward[0]])
    lateral = float(delta @ left)

    turn = math.asin(max(-1.0, min(1.0, noise.heading_share * lateral / length)))
    heading = nominal.heading + turn
    target = nominal.point_ahead(length) + delta
    base = target - length * np.array([math.cos(heading), math.sin(heading)])
    return Pose2(float(base[0]), float(base[1]), heading)
