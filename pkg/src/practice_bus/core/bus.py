"""
Practice Bus - the one place training components report to.

Trainers never write traces or reports themselves; they emit events here and
whoever cares (trace recorder, CLI, tests) listens. Dispatch is synchronous:
by the time ``emit()`` returns, every handler has seen the event.
"""

import logging
from collections import Counter, deque
from collections.abc import Callable
from typing import Any, Optional

from practice_bus.core.events import EventMetadata, PracticeEvent

EventHandler = Callable[[PracticeEvent], None]

EVENT_LOG_SIZE = 1000


class PracticeBus:
    """
    Process-wide event broker (singleton).

    Keeps the subscribers per event type, the live modules by name, the last
    ``EVENT_LOG_SIZE`` events, and how many events of each type were emitted
    since the last ``reset()``.
    """

    _instance: Optional["PracticeBus"] = None
    _initialized: bool = False

    def __new__(cls) -> "PracticeBus":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self) -> None:
        if PracticeBus._initialized:
            return
        self.handlers: dict[str, list[EventHandler]] = {}
        self.module_registry: dict[str, Any] = {}
        self.event_log: deque[PracticeEvent] = deque(maxlen=EVENT_LOG_SIZE)
        self.emitted: Counter[str] = Counter()
        self._sequence = 0
        self.debug = False
        self.logger = logging.getLogger("PracticeBus")

        PracticeBus._initialized = True
        self.logger.info("🚌 Practice Bus initialized")

    @classmethod
    def reset(cls) -> "PracticeBus":
        """Forget the current instance and return a brand new one."""
        cls._instance = None
        cls._initialized = False
        return cls()

    def set_debug(self, enabled: bool) -> None:
        """Log every emit and (un)subscribe at DEBUG level."""
        self.debug = enabled
        self.logger.setLevel(logging.DEBUG if enabled else logging.INFO)

    # ========================================================================
    # Publish / subscribe
    # ========================================================================

    def emit(
        self, event_type: str, detail: Any, source: str = "unknown", version: str = "0.0.0"
    ) -> PracticeEvent:
        """
        Deliver an event to its subscribers, in subscription order.

        A handler that raises is logged and skipped; the others still run.

        Args:
            event_type: ``"<area>:<what>"``, e.g. ``"practice:label"``
            detail: payload, a plain dict for every event the library emits
            source: emitting component
            version: emitting component's version

        Returns:
            The event as logged, with its sequence number
        """
        self._sequence += 1
        event = PracticeEvent(
            type=event_type,
            detail=detail,
            _meta=EventMetadata.create(source, version, self._sequence),
        )
        self.event_log.append(event)
        self.emitted[event_type] += 1
        if self.debug:
            self.logger.debug(f"📢 EMIT: {event}")

        # a handler may unsubscribe while we dispatch
        for handler in list(self.handlers.get(event_type, ())):
            try:
                handler(event)
            except Exception as e:
                self.logger.error(f"❌ Handler error for {event_type}: {e}", exc_info=True)
        return event

    def on(self, event_type: str, handler: EventHandler) -> Callable[[], None]:
        """
        Subscribe ``handler`` to ``event_type``.

        Returns:
            A function that unsubscribes it again (safe to call twice)
        """
        registered = self.handlers.setdefault(event_type, [])
        registered.append(handler)
        if self.debug:
            self.logger.debug(f"👂 SUBSCRIBE: {event_type} ({len(registered)} handlers)")

        def unsubscribe() -> None:
            if handler in registered:
                registered.remove(handler)
                if self.debug:
                    self.logger.debug(f"🔇 UNSUBSCRIBE: {event_type}")

        return unsubscribe

    def once(self, event_type: str, handler: EventHandler) -> Callable[[], None]:
        """Like ``on()``, but the subscription ends after the first event."""
        unsub: Callable[[], None] | None = None

        def one_time_handler(event: PracticeEvent) -> None:
            try:
                handler(event)
            finally:
                if unsub:
                    unsub()

        unsub = self.on(event_type, one_time_handler)
        return unsub

    # ========================================================================
    # History
    # ========================================================================

    def get_event_log(self, limit: int | None = None) -> list[PracticeEvent]:
        """The most recent ``limit`` events (all kept ones by default), oldest first."""
        if limit:
            return list(self.event_log)[-limit:]
        return list(self.event_log)

    def events(self, event_type: str, source: str | None = None) -> list[PracticeEvent]:
        """Logged events of one type, optionally from one component only."""
        return [
            e
            for e in self.event_log
            if e.type == event_type and (source is None or e._meta.source == source)
        ]

    def clear_event_log(self) -> None:
        """Empty the log and the per-type counts."""
        self.event_log.clear()
        self.emitted.clear()
        if self.debug:
            self.logger.debug("🧹 Event log cleared")

    # ========================================================================
    # Registry
    # ========================================================================

    def register_module(self, module: Any) -> None:
        if module.name in self.module_registry:
            self.logger.warning(
                f"⚠️ Module {module.name!r} registered twice; keeping the newest"
            )
        self.module_registry[module.name] = module
        self.logger.debug(f"📝 Module registered: {module.name} v{module.version}")

    def unregister_module(self, module_name: str) -> None:
        if self.module_registry.pop(module_name, None) is not None:
            self.logger.debug(f"🗑️  Module unregistered: {module_name}")

    def get_module(self, module_name: str) -> Any | None:
        return self.module_registry.get(module_name)

    def list_modules(self) -> list[str]:
        return list(self.module_registry)
