"""Render contract-sched experiment CSVs to SVG figures."""

from .render import EmptyDataError, MissingColumnError, PlotRequest, render

__all__ = ["EmptyDataError", "MissingColumnError", "PlotRequest", "render"]

__version__ = "0.1.0"
