#!/usr/bin/env python3
"""Regenerate the golden image hashes for the checked-in sample inputs.

Run after an intentional rendering change:  python3 scripts/regen_goldens.py
"""

import hashlib
import json
import pathlib
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from tribeat_plots import formats  # noqa: E402
from tribeat_plots.heatmap import render_heatmap  # noqa: E402
from tribeat_plots.scatter3d import render_scatter3d  # noqa: E402

DATA = ROOT / "data"


def sha256(path) -> str:
    return hashlib.sha256(pathlib.Path(path).read_bytes()).hexdigest()


def main() -> int:
    goldens = {}
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        grid = formats.read_grid(DATA / "sample_phi0.grid")
        render_heatmap(grid, tmp / "heatmap.png")
        goldens["heatmap_phi0.png"] = sha256(tmp / "heatmap.png")

        events, _ = formats.read_events(DATA / "sample_tritter_events.csv")
        render_scatter3d(events, tmp / "scatter.png")
        goldens["scatter3d_tritter.png"] = sha256(tmp / "scatter.png")

    out = DATA / "goldens.json"
    out.write_text(json.dumps(goldens, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")
    for name, digest in goldens.items():
        print(f"  {name}: {digest}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
