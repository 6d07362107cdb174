"""
Simulated devices with binary state and ground-truth success regions.

Each device carries a behavior pair. ``Behavior.PRIMARY`` (B) succeeds from
state ``False`` and leaves the device in state ``True``; ``Behavior.COMPLEMENT``
(B*) goes the other way, so the goal states of one are the start states of
the other.

Regions are axis-aligned boxes in device-local coordinates: ``dx`` along the
wall, ``dz`` up, both measured from the device placement point.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum

import numpy as np

from practice_bus.config import ScenarioConfig

logger = logging.getLogger(__name__)

CM = 0.01
SURFACE_TOLERANCE = 0.01


class Behavior(Enum):
    PRIMARY = "B"
    COMPLEMENT = "B*"

    @property
    def complement(self) -> "Behavior":
        return Behavior.COMPLEMENT if self is Behavior.PRIMARY else Behavior.PRIMARY

    @property
    def start_state(self) -> bool:
        return self is Behavior.COMPLEMENT


@dataclass(frozen=True)
class Box:
    """Axis-aligned rectangle in device-local (dx, dz) coordinates, meters."""

    x0: float
    x1: float
    z0: float
    z1: float

    def contains(self, dx: np.ndarray, dz: np.ndarray) -> np.ndarray:
        return (dx >= self.x0) & (dx <= self.x1) & (dz >= self.z0) & (dz <= self.z1)

    def signed_distance(self, dx: float, dz: float) -> float:
        """Negative inside, positive outside."""
        qx = max(self.x0 - dx, dx - self.x1)
        qz = max(self.z0 - dz, dz - self.z1)
        outside = float(np.hypot(max(qx, 0.0), max(qz, 0.0)))
        return outside + min(max(qx, qz), 0.0)


def centered_box(width: float, height: float, dz: float = 0.0) -> Box:
    return Box(-width / 2, width / 2, dz - height / 2, dz + height / 2)


@dataclass(frozen=True)
class Primitive:
    box: Box
    rgb: tuple[float, float, float]


@dataclass(frozen=True)
class BehaviorOutcome:
    """
    Result of one behavior execution.

    Attributes:
        success: whether the device changed state
        point: 3D location handed to the complementary behavior
        travel: simulated gripper travel in meters (drawers), 0 otherwise
    """

    success: bool
    point: np.ndarray
    travel: float = 0.0


class SimDevice(ABC):
    """Binary-state device driven sequentially by a single owner."""

    kind: str = ""
    actions: tuple[str, str] = ("", "")
    illuminates: bool = False

    def __init__(
        self,
        center: tuple[float, float, float] | np.ndarray,
        state: bool = False,
        label_noise: float = 0.0,
        noise_shell: float = 0.005,
        rng: np.random.Generator | None = None,
    ):
        self.center = np.asarray(center, dtype=float)
        self.state = bool(state)
        self.label_noise = label_noise
        self.noise_shell = noise_shell
        self._rng = rng if rng is not None else np.random.default_rng(0)

    # -- regions ---------------------------------------------------------

    @abstractmethod
    def region(self, which: Behavior) -> Box:
        """Success region of a behavior."""

    @abstractmethod
    def offset(self, which: Behavior) -> np.ndarray:
        """Displacement from the contact point to the returned point on success."""

    @abstractmethod
    def primitives(self, state: bool) -> list[Primitive]:
        """Rendering primitives, painted in order."""

    def travel(self, which: Behavior) -> float:
        return 0.0

    def local(self, point: np.ndarray) -> np.ndarray:
        return np.asarray(point, dtype=float) - self.center

    def in_region(self, which: Behavior, point: np.ndarray) -> bool:
        dx, dy, dz = self.local(point)
        return bool(abs(dy) <= SURFACE_TOLERANCE and self.region(which).contains(dx, dz))

    def regions_mask(self, which: Behavior, points: np.ndarray) -> np.ndarray:
        """Vectorized ``in_region`` over an (N, 3) array."""
        local = np.atleast_2d(points) - self.center
        on_surface = np.abs(local[:, 1]) <= SURFACE_TOLERANCE
        return on_surface & self.region(which).contains(local[:, 0], local[:, 2])

    def half_extent(self) -> tuple[float, float]:
        """Half width and half height of everything the device paints."""
        boxes = [p.box for s in (False, True) for p in self.primitives(s)]
        hx = max(max(-b.x0, b.x1) for b in boxes)
        hz = max(max(-b.z0, b.z1) for b in boxes)
        return hx, hz

    # -- world state -----------------------------------------------------

    def is_start_state(self, which: Behavior) -> bool:
        return self.state == which.start_state

    def is_goal_state(self, which: Behavior) -> bool:
        return self.state != which.start_state

    def action_name(self, which: Behavior) -> str:
        return self.actions[0] if which is Behavior.PRIMARY else self.actions[1]

    def applicable(self) -> Behavior:
        """The behavior whose start state holds right now."""
        return Behavior.PRIMARY if self.is_start_state(Behavior.PRIMARY) else Behavior.COMPLEMENT

    def reset(self, state: bool) -> None:
        self.state = bool(state)

    # -- execution -------------------------------------------------------

    def _near_boundary(self, which: Behavior, point: np.ndarray) -> bool:
        dx, dy, dz = self.local(point)
        if abs(dy) > SURFACE_TOLERANCE:
            return False
        return abs(self.region(which).signed_distance(dx, dz)) <= self.noise_shell

    def execute(self, which: Behavior, point: np.ndarray) -> BehaviorOutcome:
        """
        Run a behavior at ``point``.

        Succeeds only when the device is in the behavior's start state and the
        point lies in its success region; label noise may flip the physical
        outcome inside the boundary shell. Failure never changes state.
        """
        point = np.asarray(point, dtype=float)
        if not self.is_start_state(which):
            logger.debug(f"{self.kind}: {which.value} attempted from wrong state")
            return BehaviorOutcome(False, point.copy())

        success = self.in_region(which, point)
        if self.label_noise > 0 and self._near_boundary(which, point):
            if self._rng.random() < self.label_noise:
                success = not success

        if not success:
            return BehaviorOutcome(False, point.copy())

        self.state = not self.state
        return BehaviorOutcome(True, point + self.offset(which), self.travel(which))


class LightSwitch(SimDevice):
    """Toggle switch on a 7 x 11.5 cm plate; the 0.8 cm lever shows its state."""

    kind = "light-switch"
    actions = ("switch-on", "switch-off")
    illuminates = True

    PLATE = centered_box(7.0 * CM, 11.5 * CM)
    BODY = centered_box(0.8 * CM, 1.2 * CM)
    LEVER_UP = Box(-0.4 * CM, 0.4 * CM, 0.6 * CM, 1.4 * CM)
    LEVER_DOWN = Box(-0.4 * CM, 0.4 * CM, -1.4 * CM, -0.6 * CM)
    OFFSET = 0.08

    def region(self, which: Behavior) -> Box:
        if which is Behavior.PRIMARY:
            return Box(-1.0 * CM, 1.0 * CM, 0.5 * CM, 2.5 * CM)
        return Box(-1.0 * CM, 1.0 * CM, -2.5 * CM, -0.5 * CM)

    def offset(self, which: Behavior) -> np.ndarray:
        sign = 1.0 if which is Behavior.PRIMARY else -1.0
        return np.array([0.0, 0.0, sign * self.OFFSET])

    def primitives(self, state: bool) -> list[Primitive]:
        return [
            Primitive(self.PLATE, (196.0, 192.0, 180.0)),
            Primitive(self.BODY, (120.0, 118.0, 112.0)),
            Primitive(self.LEVER_UP if state else self.LEVER_DOWN, (62.0, 58.0, 54.0)),
        ]


class Rocker(SimDevice):
    """Rocker switch: 4 x 7 cm paddle, the pressed half renders darker."""

    kind = "rocker"
    actions = ("rocker-on", "rocker-off")
    illuminates = True

    PLATE = centered_box(7.0 * CM, 11.5 * CM)
    TOP = Box(-2.0 * CM, 2.0 * CM, 0.0, 3.5 * CM)
    BOTTOM = Box(-2.0 * CM, 2.0 * CM, -3.5 * CM, 0.0)
    OFFSET = 0.05

    def region(self, which: Behavior) -> Box:
        # 1 cm dead zone around the pivot
        if which is Behavior.PRIMARY:
            return Box(-2.0 * CM, 2.0 * CM, 0.5 * CM, 3.5 * CM)
        return Box(-2.0 * CM, 2.0 * CM, -3.5 * CM, -0.5 * CM)

    def offset(self, which: Behavior) -> np.ndarray:
        sign = -1.0 if which is Behavior.PRIMARY else 1.0
        return np.array([0.0, 0.0, sign * self.OFFSET])

    def primitives(self, state: bool) -> list[Primitive]:
        pressed, raised = (150.0, 146.0, 138.0), (188.0, 184.0, 174.0)
        return [
            Primitive(self.PLATE, (200.0, 196.0, 186.0)),
            Primitive(self.TOP, pressed if state else raised),
            Primitive(self.BOTTOM, raised if state else pressed),
        ]


class Drawer(SimDevice):
    """
    Drawer front with a handle bar.

    Opening needs the handle bar near the top edge; closing works anywhere on
    the face. An open drawer shows a dark gap around its face.
    """

    kind = "drawer"
    actions = ("drawer-open", "drawer-close")

    FACE = centered_box(40.0 * CM, 20.0 * CM)
    HANDLE = centered_box(12.0 * CM, 1.5 * CM, dz=8.0 * CM)
    GAP = centered_box(43.0 * CM, 23.0 * CM)

    def __init__(
        self,
        center: tuple[float, float, float] | np.ndarray,
        state: bool = False,
        label_noise: float = 0.0,
        noise_shell: float = 0.005,
        rng: np.random.Generator | None = None,
        travel: float = 0.15,
    ):
        super().__init__(center, state, label_noise, noise_shell, rng)
        self._travel = travel

    def region(self, which: Behavior) -> Box:
        return self.HANDLE if which is Behavior.PRIMARY else self.FACE

    def travel(self, which: Behavior) -> float:
        return self._travel

    def offset(self, which: Behavior) -> np.ndarray:
        # contact point displaced along the wall normal by the gripper travel
        sign = 1.0 if which is Behavior.PRIMARY else -1.0
        return np.array([0.0, sign * self._travel, 0.0])

    def primitives(self, state: bool) -> list[Primitive]:
        shapes = [Primitive(self.GAP, (38.0, 32.0, 28.0))] if state else []
        return shapes + [
            Primitive(self.FACE, (150.0, 104.0, 62.0)),
            Primitive(self.HANDLE, (72.0, 72.0, 78.0)),
        ]


DEVICE_TYPES: dict[str, type[SimDevice]] = {
    LightSwitch.kind: LightSwitch,
    Rocker.kind: Rocker,
    Drawer.kind: Drawer,
}


def build_device(config: ScenarioConfig, rng: np.random.Generator | None = None) -> SimDevice:
    """Instantiate the scenario's device in its configured initial state."""
    dev = config.device
    if config.device_kind == Drawer.kind:
        return Drawer(
            dev.placement,
            dev.initial_state,
            dev.label_noise,
            dev.noise_shell,
            rng,
            travel=dev.drawer_travel,
        )
    device_type = DEVICE_TYPES[config.device_kind]
    return device_type(dev.placement, dev.initial_state, dev.label_noise, dev.noise_shell, rng)
