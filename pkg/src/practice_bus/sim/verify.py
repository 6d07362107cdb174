"""Verification functions: decide success from before/after sensing."""

from dataclasses import dataclass
from enum import Enum

from practice_bus.config import VerifierConfig
from practice_bus.errors import VerificationError
from practice_bus.sim.scene import Observation


class VerifierKind(Enum):
    ORACLE = "oracle"
    INTENSITY_DIFF = "intensity-diff"
    DISPLACEMENT = "displacement"


@dataclass(frozen=True)
class Transition:
    """Ground truth of one execution as the simulator saw it."""

    succeeded: bool
    travel: float = 0.0


@dataclass(frozen=True)
class Verifier:
    kind: VerifierKind = VerifierKind.INTENSITY_DIFF
    threshold: float = 10.0
    min_travel: float = 0.10

    @classmethod
    def from_config(cls, config: VerifierConfig) -> "Verifier":
        return cls(VerifierKind(config.kind), config.threshold, config.min_travel)

    def __call__(self, before: Observation, after: Observation, truth: Transition) -> bool:
        return verify(self, before, after, truth)


def verify(verifier: Verifier, before: Observation, after: Observation, truth: Transition) -> bool:
    """
    Label an execution.

    Raises:
        VerificationError: before and after images differ in size
    """
    if before.rgb.shape != after.rgb.shape:
        raise VerificationError(
            f"image size mismatch: {before.rgb.shape} before, {after.rgb.shape} after"
        )
    if verifier.kind is VerifierKind.ORACLE:
        return truth.succeeded
    if verifier.kind is VerifierKind.INTENSITY_DIFF:
        delta = after.mean_intensity() - before.mean_intensity()
        return abs(delta) > verifier.threshold
    return truth.travel >= verifier.min_travel
