"""
Bus-connected components.

A ``PracticeModule`` owns its subscriptions and announces its lifecycle on
the Bus (``module:initializing``, ``module:ready``, ``module:error``,
``module:destroyed``). Trainers and recorders are modules, so a run can be
watched without holding references to any of them.
"""

import logging
from collections.abc import Callable
from types import TracebackType
from typing import Any, Self

from practice_bus.core.bus import EventHandler, PracticeBus
from practice_bus.core.events import ModuleStatus


class PracticeModule:
    """
    Base class for components that talk through the Bus.

    Subclasses put their setup in ``_initialize()``; ``init()`` wraps it with
    the lifecycle events. Used as a context manager, a module is initialized
    on entry (unless it already is) and destroyed on exit.

    Args:
        name: registry key, unique among live modules
        version: reported in every event the module emits
        description: one line for ``get_status()``
    """

    def __init__(self, name: str, version: str = "0.0.0", description: str = ""):
        self.name = name
        self.version = version
        self.description = description
        self.status = ModuleStatus.UNINITIALIZED

        self._unsubs: list[Callable[[], None]] = []
        self._bus = PracticeBus()
        self.logger = logging.getLogger(f"PracticeModule.{name}")

        self._bus.register_module(self)
        self.logger.debug(f"🧩 Module created: {name} v{version}")

    def _lifecycle(self, status: ModuleStatus, **extra: Any) -> None:
        self.status = status
        detail = {"name": self.name, "version": self.version, "status": status.value, **extra}
        self.emit(f"module:{status.value}", detail)

    def init(self) -> None:
        """
        Run ``_initialize()`` between ``module:initializing`` and ``module:ready``.

        Raises:
            Exception: whatever ``_initialize()`` raised, after ``module:error``
        """
        self._lifecycle(ModuleStatus.INITIALIZING)
        try:
            self._initialize()
        except Exception as e:
            self._lifecycle(ModuleStatus.ERROR, error=str(e))
            self.logger.error(f"❌ Module init failed: {self.name} - {e}", exc_info=True)
            raise
        self._lifecycle(ModuleStatus.READY)
        self.logger.debug(f"✅ Module ready: {self.name}")

    def _initialize(self) -> None:
        """Set up state and subscriptions; override in subclasses."""

    def emit(self, event_type: str, detail: Any) -> None:
        self._bus.emit(event_type, detail, source=self.name, version=self.version)

    def on(self, event_type: str, handler: EventHandler) -> None:
        """Subscribe until ``destroy()``."""
        self._unsubs.append(self._bus.on(event_type, handler))

    def once(self, event_type: str, handler: EventHandler) -> None:
        """Subscribe for a single event, or until ``destroy()``."""
        self._unsubs.append(self._bus.once(event_type, handler))

    def destroy(self) -> None:
        """Drop every subscription, announce ``module:destroyed`` and leave the registry."""
        if self.status is ModuleStatus.DESTROYED:
            return
        for unsub in self._unsubs:
            unsub()
        self._unsubs.clear()

        # listeners may still look the module up while handling the event
        self.emit("module:destroyed", {"name": self.name, "version": self.version})
        self._bus.unregister_module(self.name)
        self.status = ModuleStatus.DESTROYED
        self.logger.debug(f"💀 Module destroyed: {self.name}")

    def __enter__(self) -> Self:
        if self.status is ModuleStatus.UNINITIALIZED:
            self.init()
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        self.destroy()

    def get_status(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "version": self.version,
            "description": self.description,
            "status": self.status.value,
        }
