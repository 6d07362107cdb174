"""Seeded procedural textures for the wall surface and device primitives."""

import numpy as np

WALL_BASE_RGB = np.array([158.0, 148.0, 132.0])
ALBEDO_MAX = 200.0


class ValueNoise:
    """
    Bilinearly interpolated lattice noise on a planar patch.

    Lattice values are drawn once from ``rng`` in [-1, 1]; sampling is a pure
    function of the lattice afterwards.
    """

    def __init__(
        self,
        rng: np.random.Generator,
        extent: tuple[float, float],
        cell: float,
        channels: int = 3,
        origin: tuple[float, float] = (0.0, 0.0),
    ):
        self.cell = cell
        self.origin = origin
        self.extent = extent
        nx = int(np.ceil(extent[0] / cell)) + 2
        nz = int(np.ceil(extent[1] / cell)) + 2
        self.lattice = rng.uniform(-1.0, 1.0, size=(nz, nx, channels))

    def sample(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        gx = np.clip((x - self.origin[0]) / self.cell, 0.0, self.lattice.shape[1] - 1.000001)
        gz = np.clip((z - self.origin[1]) / self.cell, 0.0, self.lattice.shape[0] - 1.000001)
        ix = np.floor(gx).astype(np.int64)
        iz = np.floor(gz).astype(np.int64)
        fx = (gx - ix)[..., None]
        fz = (gz - iz)[..., None]
        lat = self.lattice
        top = lat[iz, ix] * (1 - fx) + lat[iz, ix + 1] * fx
        bottom = lat[iz + 1, ix] * (1 - fx) + lat[iz + 1, ix + 1] * fx
        return top * (1 - fz) + bottom * fz


class WallTexture:
    """Background: colored fine and coarse noise plus a low-frequency gradient."""

    def __init__(self, seed: int, width: float, height: float):
        rng = np.random.default_rng(seed)
        self.width = width
        self.height = height
        self.fine = ValueNoise(rng, (width, height), cell=0.005)
        self.coarse = ValueNoise(rng, (width, height), cell=0.08)
        direction = rng.normal(size=2)
        self.gradient_dir = direction / np.linalg.norm(direction)
        self.gradient_rgb = rng.uniform(6.0, 14.0, size=3)
        self.tint = rng.uniform(-12.0, 12.0, size=3)

    def albedo(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        span = max(self.width, self.height)
        dx, dz = self.gradient_dir
        ramp = ((x - self.width / 2) * dx + (z - self.height / 2) * dz) / span
        rgb = (
            WALL_BASE_RGB
            + self.tint
            + 16.0 * self.fine.sample(x, z)
            + 14.0 * self.coarse.sample(x, z)
            + 2.0 * ramp[..., None] * self.gradient_rgb
        )
        return np.clip(rgb, 0.0, ALBEDO_MAX)


class PrimitiveTexture:
    """
    Fine noise applied on top of device primitive colors.

    Uses its own fixed seed so device appearance does not depend on the wall
    texture seed.
    """

    SEED = 1729

    def __init__(self, half_extent: tuple[float, float], amplitude: float = 7.0):
        rng = np.random.default_rng(self.SEED)
        self.amplitude = amplitude
        self.noise = ValueNoise(
            rng,
            (2 * half_extent[0], 2 * half_extent[1]),
            cell=0.003,
            origin=(-half_extent[0], -half_extent[1]),
        )

    def shade(self, base_rgb: np.ndarray, dx: np.ndarray, dz: np.ndarray) -> np.ndarray:
        return np.clip(base_rgb + self.amplitude * self.noise.sample(dx, dz), 0.0, ALBEDO_MAX)
