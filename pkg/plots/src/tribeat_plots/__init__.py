"""Figure rendering for tribeat landscape grids and detection-event files."""

from tribeat_plots.formats import Event, Grid, ParseError, read_events, read_grid
from tribeat_plots.heatmap import darkest_point, render_heatmap
from tribeat_plots.scatter3d import project_points, render_scatter3d, view_angles

__version__ = "0.1.0"
