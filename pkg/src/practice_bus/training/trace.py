"""Line-oriented training trace built from ``practice:label`` events."""

import math
from pathlib import Path

from practice_bus._version import __version__
from practice_bus.core import events
from practice_bus.core.events import PracticeEvent
from practice_bus.core.module import PracticeModule


def format_label_line(sequence: int, detail: dict) -> str:
    distance = detail.get("distance", math.nan)
    distance_text = "nan" if distance is None or math.isnan(distance) else f"{distance:.6f}"
    x, y, z = detail["point"]
    return (
        f"seq={sequence:05d} phase={detail['phase']} action={detail['action']} "
        f"pose={detail['pose']} point={x:.6f},{y:.6f},{z:.6f} "
        f"distance={distance_text} label={int(detail['label']):+d} pool={int(detail['pool'])}"
    )


class TraceRecorder(PracticeModule):
    """
    Collects one text line per labeled example.

    Lines are numbered by the recorder itself and carry no timestamps, so two
    runs from the same seed produce identical traces.
    """

    def __init__(self, source: str | None = None, name: str = "trace"):
        super().__init__(name, __version__, "Records labeled examples as text")
        self.source = source
        self.lines: list[str] = []

    def _initialize(self) -> None:
        self.on(events.LABEL, self._record)

    def _record(self, event: PracticeEvent) -> None:
        if self.source is not None and event.source != self.source:
            return
        self.lines.append(format_label_line(len(self.lines), event.detail))

    def __len__(self) -> int:
        return len(self.lines)

    def text(self) -> str:
        return "".join(line + "\n" for line in self.lines)

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(self.text(), encoding="utf-8")
        self.logger.debug(f"📦 Wrote {len(self.lines)} trace lines to {path}")
        return path
