"""Parsers for the tribeat text formats.

Deliberately independent of the tribeat package: this tool talks to the
simulator only through its documented file formats (grid files: '#' header
with grid spec + comma-delimited density rows; event files: one threefold
coincidence per line).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    x: np.ndarray
    y: np.ndarray
    values: np.ndarray  # values[i, j] at (x[i], y[j])
    metadata: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Event:
    event_id: int
    batch_id: int
    times_by_port: tuple[float, float, float]
    contaminated: bool


def read_grid(path) -> Grid:
    header: dict[str, str] = {}
    rows: list[list[float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if text.startswith("#"):
                body = text[1:].strip()
                if ":" in body:
                    key, _, value = body.partition(":")
                    header[key.strip()] = value.strip()
                continue
            try:
                rows.append([float(tok) for tok in text.split(",")])
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from exc
    try:
        x_min = float(header["x_min"])
        x_max = float(header["x_max"])
        y_min = float(header["y_min"])
        y_max = float(header["y_max"])
        step = float(header["step"])
    except KeyError as exc:
        raise ParseError(f"{path}: missing grid header field {exc}") from exc
    nx = int(round((x_max - x_min) / step)) + 1
    ny = int(round((y_max - y_min) / step)) + 1
    values = np.asarray(rows, dtype=float)
    if values.shape != (nx, ny):
        raise ParseError(f"{path}: expected {nx}x{ny} values, found {values.shape}")
    return Grid(x=x_min + step * np.arange(nx), y=y_min + step * np.arange(ny),
                values=values, metadata=header)


def read_events(path) -> tuple[list[Event], dict]:
    events: list[Event] = []
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
                raise ParseError(f"{path}: line {lineno}: expected 9 fields, got {len(cells)}")
            try:
                event_id = int(cells[0])
                batch_id = int(cells[1])
                by_port: dict[int, float] = {}
                for k in range(3):
                    by_port[int(cells[2 + 2 * k])] = float(cells[3 + 2 * k])
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}") from exc
            if sorted(by_port) != [1, 2, 3]:
                raise ParseError(
                    f"{path}: line {lineno}: expected one record per port 1..3, "
                    f"got ports {sorted(by_port)}")
            events.append(Event(event_id=event_id, batch_id=batch_id,
                                times_by_port=(by_port[1], by_port[2], by_port[3]),
                                contaminated=cells[8] == "contam"))
    return events, metadata
