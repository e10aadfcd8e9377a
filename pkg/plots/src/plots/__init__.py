"""Standalone figure rendering for the scheduler's CSV outputs.

The CSV schemas are the only contract with the simulation package; nothing
here imports it.
"""

from .render import KINDS, PlotDataError, build_figure, render

__all__ = ["KINDS", "PlotDataError", "build_figure", "render"]
