"""
Event structures, and the names of the events the library emits.

Detail payloads are plain dicts of JSON-friendly values so listeners can log
or serialize them without knowing any library types.
"""

from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Any

LABEL = "practice:label"
VISIT = "practice:visit"
CONVERGED = "practice:converged"
INITIALIZED = "practice:initialized"
ATTEMPT = "execution:attempt"


class ModuleStatus(Enum):
    """Lifecycle of a ``PracticeModule``; also the suffix of its ``module:*`` events."""

    UNINITIALIZED = "uninitialized"
    INITIALIZING = "initializing"
    READY = "ready"
    ERROR = "error"
    DESTROYED = "destroyed"


@dataclass(frozen=True)
class EventMetadata:
    """
    Attributes:
        timestamp: wall-clock epoch milliseconds, for people reading logs
        source: emitting component
        version: emitting component's version
        sequence: 1-based position in the bus's emission order
    """

    timestamp: int
    source: str
    version: str
    sequence: int = 0

    @staticmethod
    def create(source: str, version: str, sequence: int = 0) -> "EventMetadata":
        """Metadata stamped with the current time."""
        return EventMetadata(int(datetime.now().timestamp() * 1000), source, version, sequence)


@dataclass(frozen=True)
class PracticeEvent:
    """
    One thing that happened.

    Reproducible outputs (trace files) read ``type``, ``detail`` and the
    sequence number only, never the timestamp.
    """

    type: str
    detail: Any
    _meta: EventMetadata

    @property
    def source(self) -> str:
        return self._meta.source

    def __str__(self) -> str:
        return (
            f"PracticeEvent(type='{self.type}', source='{self.source}', "
            f"seq={self._meta.sequence})"
        )
