"""
Core components of the Practice Bus.

- PracticeBus: the central event broker
- PracticeModule: base class for bus-connected components
- Event structures: PracticeEvent, EventMetadata, ModuleStatus
"""

from practice_bus.core.bus import PracticeBus
from practice_bus.core.events import EventMetadata, ModuleStatus, PracticeEvent
from practice_bus.core.module import PracticeModule

__all__ = [
    "PracticeBus",
    "PracticeModule",
    "PracticeEvent",
    "EventMetadata",
    "ModuleStatus",
]
