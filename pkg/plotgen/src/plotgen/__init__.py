"""Figure rendering for exported simulation run directories."""

from .render import (MODE_STYLE, PANELS, MissingInput, build_figure,
                     load_cdf, load_time_series, mode_label, render)

__all__ = ["MODE_STYLE", "PANELS", "MissingInput", "build_figure",
           "load_cdf", "load_time_series", "mode_label", "render"]
__version__ = "0.1.0"
