"""tribeat-plot: render grid and event files into figures."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from tribeat_plots import formats
from tribeat_plots.heatmap import DEFAULT_CMAP, render_heatmap
from tribeat_plots.scatter3d import render_scatter3d


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 2


def cmd_heatmap(args) -> int:
    try:
        grid = formats.read_grid(args.input)
    except (OSError, formats.ParseError) as exc:
        return _fail(str(exc))
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    render_heatmap(grid, out, cmap=args.cmap, vmin=args.vmin, vmax=args.vmax,
                   title=args.title)
    print(f"wrote {out}")
    return 0


def cmd_scatter3d(args) -> int:
    try:
        events, _ = formats.read_events(args.input)
    except (OSError, formats.ParseError) as exc:
        return _fail(str(exc))
    try:
        direction = tuple(float(tok) for tok in args.view.split(","))
    except ValueError:
        return _fail(f"bad view direction {args.view!r}; expected e.g. 1,1,1")
    if len(direction) != 3:
        return _fail(f"bad view direction {args.view!r}; expected three components")
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    render_scatter3d(events, out, direction=direction, title=args.title)
    print(f"wrote {out} ({len(events)} events)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tribeat-plot",
                                 description="render tribeat grid/event files to images")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("heatmap", help="2-D landscape heatmap from a grid file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--cmap", default=DEFAULT_CMAP)
    p.add_argument("--vmin", type=float, default=None)
    p.add_argument("--vmax", type=float, default=None)
    p.add_argument("--title", default=None)
    p.set_defaults(fn=cmd_heatmap)

    p = sub.add_parser("scatter3d", help="3-D event scatter from an event file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--view", default="1,1,1", help="view direction, e.g. 1,1,1")
    p.add_argument("--title", default=None)
    p.set_defaults(fn=cmd_scatter3d)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
