"""Batch renderer for benchmark CSVs: profile step plots and error box plots."""

from .data import BOX_COLUMNS, PROFILE_COLUMNS, CsvFormatError, read_box, read_profile
from .render import build_box_figure, build_profile_figure, render_box, render_profile
from .stats import box_stats

__version__ = "0.1.0"

__all__ = [
    "BOX_COLUMNS",
    "PROFILE_COLUMNS",
    "CsvFormatError",
    "read_box",
    "read_profile",
    "box_stats",
    "build_box_figure",
    "build_profile_figure",
    "render_box",
    "render_profile",
    "__version__",
]
