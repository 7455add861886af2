"""3-D event scatters viewed along a chosen direction (default (1,1,1))."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGSIZE = (5.2, 4.8)
DPI = 150


def view_angles(direction) -> tuple[float, float]:
    """(elev, azim) in degrees for a camera looking along `direction`."""
    d = np.asarray(direction, dtype=float)
    if d.shape != (3,) or not np.any(d):
        raise ValueError("view direction must be a nonzero 3-vector")
    azim = np.degrees(np.arctan2(d[1], d[0]))
    elev = np.degrees(np.arctan2(d[2], np.hypot(d[0], d[1])))
    return float(elev), float(azim)


def project_points(points, direction=(1.0, 1.0, 1.0)) -> np.ndarray:
    """Orthographic projection onto the plane perpendicular to `direction`.

    Components along the view direction collapse to the origin, so a point
    (c, c, c) maps to (0, 0) for the default diagonal view.
    """
    p = np.atleast_2d(np.asarray(points, dtype=float))
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    # orthonormal basis spanning the view plane
    trial = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = trial - d * (trial @ d)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    return np.stack([p @ e1, p @ e2], axis=-1)


def render_scatter3d(events, output_path, direction=(1.0, 1.0, 1.0),
                     color: str = "#1f77b4", title: str | None = None) -> None:
    """Write a 3-D scatter of (t1, t2, t3) with an orthographic camera along
    `direction`; an empty event list produces a labelled empty plot."""
    fig = plt.figure(figsize=FIGSIZE, dpi=DPI)
    ax = fig.add_subplot(projection="3d", proj_type="ortho")
    if events:
        pts = np.array([ev.times_by_port for ev in events])
        ax.scatter(pts[:, 0], pts[:, 1], pts[:, 2], s=3.0, alpha=0.5,
                   color=color, linewidths=0.0)
    else:
        ax.text2D(0.5, 0.5, "no events", transform=ax.transAxes,
                  ha="center", va="center")
    elev, azim = view_angles(direction)
    ax.view_init(elev=elev, azim=azim)
    ax.set_xlabel(r"$t_1$ (ns)")
    ax.set_ylabel(r"$t_2$ (ns)")
    ax.set_zlabel(r"$t_3$ (ns)")
    if title is None:
        title = f"threefold coincidences ({len(events)} events)"
    ax.set_title(title)
    fig.savefig(output_path, metadata={"Software": None})
    plt.close(fig)
