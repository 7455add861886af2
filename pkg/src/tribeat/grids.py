"""Rectangular (x, y) density grids and their on-disk text format.

The axes are the detection-time differences x = t1 - t3 and y = t2 - t3 in
ns.  Files are self-describing: '#'-prefixed header lines with the grid spec
and metadata, followed by comma-delimited density rows (one row per x value,
y varying within the row).  Values are written with %.17g so a rewrite of the
same grid is byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FORMAT_NAME = "tribeat landscape grid"
FORMAT_VERSION = 1


class GridFormatError(ValueError):
    """Raised when a grid file fails to parse or validate."""


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    step: float

    def __post_init__(self):
        if self.step <= 0:
            raise GridFormatError("grid step must be positive")
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise GridFormatError("grid extents must be nonempty")

    @property
    def x(self) -> np.ndarray:
        n = int(round((self.x_max - self.x_min) / self.step)) + 1
        return self.x_min + self.step * np.arange(n)

    @property
    def y(self) -> np.ndarray:
        n = int(round((self.y_max - self.y_min) / self.step)) + 1
        return self.y_min + self.step * np.arange(n)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.x.size, self.y.size)


DEFAULT_SPEC = GridSpec(-100.0, 100.0, -100.0, 100.0, 1.0)


@dataclass(frozen=True)
class LandscapeGrid:
    """Nonnegative density sampled on a uniform rectangular grid.

    `values[i, j]` is the density at (x[i], y[j]).  `metadata` records how the
    grid was produced (phase, detunings, envelope parameters, config hash).
    """

    spec: GridSpec
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.spec.shape:
            raise GridFormatError(f"values shape {v.shape} != grid shape {self.spec.shape}")
        if not np.all(np.isfinite(v)):
            raise GridFormatError("grid values must be finite")
        if np.any(v < 0):
            raise GridFormatError("grid values must be nonnegative")
        object.__setattr__(self, "values", v)

    @property
    def x(self) -> np.ndarray:
        return self.spec.x

    @property
    def y(self) -> np.ndarray:
        return self.spec.y

    def value_at(self, x: float, y: float) -> float:
        """Bilinear interpolation; zero outside the grid."""
        return float(bilinear(self, np.asarray([x]), np.asarray([y]))[0])


def bilinear(grid: LandscapeGrid, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorised bilinear interpolation with NaN outside the grid extent."""
    s = grid.spec
    fx = (np.asarray(xs, dtype=float) - s.x_min) / s.step
    fy = (np.asarray(ys, dtype=float) - s.y_min) / s.step
    nx, ny = s.shape
    out = np.full(np.broadcast(fx, fy).shape, np.nan)
    inside = (fx >= 0) & (fx <= nx - 1) & (fy >= 0) & (fy <= ny - 1)
    fxc = np.clip(fx, 0, nx - 1)
    fyc = np.clip(fy, 0, ny - 1)
    i0 = np.minimum(fxc.astype(int), nx - 2)
    j0 = np.minimum(fyc.astype(int), ny - 2)
    ax = fxc - i0
    ay = fyc - j0
    v = (grid.values[i0, j0] * (1 - ax) * (1 - ay)
         + grid.values[i0 + 1, j0] * ax * (1 - ay)
         + grid.values[i0, j0 + 1] * (1 - ax) * ay
         + grid.values[i0 + 1, j0 + 1] * ax * ay)
    out[inside] = np.broadcast_to(v, out.shape)[inside]
    return out


def write_grid(grid: LandscapeGrid, path) -> None:
    s = grid.spec
    lines = [
        f"# {FORMAT_NAME} v{FORMAT_VERSION}",
        f"# x_min: {s.x_min:.17g}",
        f"# x_max: {s.x_max:.17g}",
        f"# y_min: {s.y_min:.17g}",
        f"# y_max: {s.y_max:.17g}",
        f"# step: {s.step:.17g}",
    ]
    for key in sorted(grid.metadata):
        lines.append(f"# {key}: {grid.metadata[key]}")
    lines.append("# rows: x, columns: y, comma-delimited")
    for row in grid.values:
        lines.append(",".join(f"{v:.17g}" for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_grid(path) -> LandscapeGrid:
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
                raise GridFormatError(f"{path}: line {lineno}: {exc}") from exc
    try:
        spec = GridSpec(x_min=float(header["x_min"]), x_max=float(header["x_max"]),
                        y_min=float(header["y_min"]), y_max=float(header["y_max"]),
                        step=float(header["step"]))
    except KeyError as exc:
        raise GridFormatError(f"{path}: missing header field {exc}") from exc
    values = np.array(rows, dtype=float) if rows else np.zeros((0, 0))
    if values.shape != spec.shape:
        raise GridFormatError(
            f"{path}: data shape {values.shape} does not match grid spec {spec.shape}")
    meta = {k: v for k, v in header.items()
            if k not in {"x_min", "x_max", "y_min", "y_max", "step", "rows"}}
    return LandscapeGrid(spec=spec, values=values, metadata=meta)
