import pathlib

import numpy as np
import pytest

from tribeat_plots import formats

DATA = pathlib.Path(__file__).resolve().parents[1] / "data"


def test_read_sample_grid():
    grid = formats.read_grid(DATA / "sample_phi0.grid")
    assert grid.values.shape == (101, 101)
    assert grid.x[0] == -100.0 and grid.x[-1] == 100.0
    assert np.all(grid.values >= 0.0)
    assert "config_hash" in grid.metadata


def test_read_sample_events():
    events, meta = formats.read_events(DATA / "sample_tritter_events.csv")
    assert len(events) > 100
    assert meta["seed"] == "17"
    for ev in events[:20]:
        assert len(ev.times_by_port) == 3


def test_grid_parse_error_names_line(tmp_path):
    bad = tmp_path / "bad.grid"
    bad.write_text("# x_min: 0\n# x_max: 1\n# y_min: 0\n# y_max: 1\n# step: 1\n"
                   "0,0\nbad,row\n")
    with pytest.raises(formats.ParseError, match="line 7"):
        formats.read_grid(bad)


def test_event_parse_error_names_line(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("0,0,1,1.0,2,2.0,3,3.0,ok\n0,0,nope\n")
    with pytest.raises(formats.ParseError, match="line 2"):
        formats.read_events(bad)


def test_events_require_all_ports(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("0,0,1,1.0,1,2.0,3,3.0,ok\n")
    with pytest.raises(formats.ParseError, match="port"):
        formats.read_events(bad)
