"""Detection events and their on-disk text format.

One line per emitted threefold coincidence:
    event_id,batch_id,port1,t1_ns,port2,t2_ns,port3,t3_ns,flags
with '#'-prefixed header lines (format version, config hash, seed, trial
count).  Times use %.17g so rewrites are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FORMAT_NAME = "tribeat events"
FORMAT_VERSION = 1

FLAG_OK = "ok"
FLAG_CONTAMINATED = "contam"


class EventFormatError(ValueError):
    """Raised when an event file fails to parse or validate."""


@dataclass(frozen=True)
class DetectionEvent:
    """One coincidence: ordered (port, time) records plus batch metadata."""

    event_id: int
    batch_id: int
    records: tuple[tuple[int, float], ...]
    tags: dict = field(default_factory=dict)

    def __post_init__(self):
        for port, t in self.records:
            if port < 1:
                raise EventFormatError(f"port {port} is not a valid 1-based mode index")
            if not np.isfinite(t):
                raise EventFormatError("detection times must be finite")

    @property
    def contaminated(self) -> bool:
        return bool(self.tags.get("contaminated", False))

    def time_at_port(self, port: int) -> float:
        hits = [t for p, t in self.records if p == port]
        if len(hits) != 1:
            raise EventFormatError(f"event {self.event_id} has {len(hits)} records at port {port}")
        return hits[0]


def threefold_times(event: DetectionEvent) -> tuple[float, float, float]:
    """(t1, t2, t3) keyed by port label; requires one record per port 1..3."""
    return (event.time_at_port(1), event.time_at_port(2), event.time_at_port(3))


def write_events(events, path, metadata: dict | None = None) -> None:
    metadata = metadata or {}
    lines = [f"# {FORMAT_NAME} v{FORMAT_VERSION}"]
    for key in sorted(metadata):
        lines.append(f"# {key}: {metadata[key]}")
    lines.append("# columns: event_id,batch_id,port1,t1_ns,port2,t2_ns,port3,t3_ns,flags")
    for ev in events:
        if len(ev.records) != 3:
            raise EventFormatError(
                f"event {ev.event_id} has {len(ev.records)} records; the file format "
                "stores threefold coincidences")
        cells = [str(ev.event_id), str(ev.batch_id)]
        for port, t in ev.records:
            cells.append(str(port))
            cells.append(f"{t:.17g}")
        cells.append(FLAG_CONTAMINATED if ev.contaminated else FLAG_OK)
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_events(path) -> tuple[list[DetectionEvent], dict]:
    events: list[DetectionEvent] = []
    metadata: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                body = text[1:].strip()
                if ":" in body:
                    key, _, value = body.partition(":")
                    metadata[key.strip()] = value.strip()
                continue
            cells = text.split(",")
            if len(cells) != 9:
                raise EventFormatError(f"{path}: line {lineno}: expected 9 fields, got {len(cells)}")
            try:
                event_id = int(cells[0])
                batch_id = int(cells[1])
                records = tuple((int(cells[2 + 2 * k]), float(cells[3 + 2 * k])) for k in range(3))
            except ValueError as exc:
                raise EventFormatError(f"{path}: line {lineno}: {exc}") from exc
            flag = cells[8]
            if flag not in (FLAG_OK, FLAG_CONTAMINATED):
                raise EventFormatError(f"{path}: line {lineno}: unknown flag {flag!r}")
            events.append(DetectionEvent(event_id=event_id, batch_id=batch_id,
                                         records=records,
                                         tags={"contaminated": flag == FLAG_CONTAMINATED}))
    return events, metadata
