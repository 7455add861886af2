"""Landscape heatmaps in the style of published correlation-landscape figures."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from tribeat_plots.formats import Grid

DEFAULT_CMAP = "viridis"
FIGSIZE = (5.2, 4.4)
DPI = 150


def darkest_point(grid: Grid, floor_frac: float = 0.2,
                  window_bins: int = 9) -> tuple[float, float]:
    """Location of the minimum inside the bright part of the landscape.

    Cells qualify when the local (boxcar) mean around them reaches
    `floor_frac` of the largest local mean, which excludes the empty outer
    tails where the density is trivially small.
    """
    v = grid.values
    kernel = np.ones(window_bins)
    local = np.apply_along_axis(lambda r: np.convolve(r, kernel, mode="same"), 0, v)
    local = np.apply_along_axis(lambda r: np.convolve(r, kernel, mode="same"), 1, local)
    norm = np.outer(np.convolve(np.ones(v.shape[0]), kernel, mode="same"),
                    np.convolve(np.ones(v.shape[1]), kernel, mode="same"))
    local = local / norm
    bright = local >= floor_frac * local.max()
    masked = np.where(bright, v, np.inf)
    i, j = np.unravel_index(int(np.argmin(masked)), v.shape)
    return float(grid.x[i]), float(grid.y[j])


def render_heatmap(grid: Grid, output_path, cmap: str = DEFAULT_CMAP,
                   vmin: float | None = None, vmax: float | None = None,
                   title: str | None = None) -> None:
    """Write a heatmap image; identical inputs produce identical bytes."""
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    # values[i, j] indexes (x, y); imshow wants rows = vertical axis = y here,
    # so transpose and set origin lower to put (x_min, y_min) bottom-left
    im = ax.imshow(grid.values.T, origin="lower", aspect="equal", cmap=cmap,
                   vmin=vmin, vmax=vmax,
                   extent=(grid.x[0], grid.x[-1], grid.y[0], grid.y[-1]))
    ax.set_xlabel(r"$t_1 - t_3$ (ns)")
    ax.set_ylabel(r"$t_2 - t_3$ (ns)")
    if title is None:
        phi = grid.metadata.get("phi")
        title = f"correlation landscape (phi = {float(phi):.3g})" if phi else \
            "correlation landscape"
    ax.set_title(title)
    fig.colorbar(im, ax=ax, label="density (1/ns$^2$)")
    fig.tight_layout()
    fig.savefig(output_path, metadata={"Software": None})
    plt.close(fig)
