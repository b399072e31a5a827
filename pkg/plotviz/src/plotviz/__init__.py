"""Figure rendering for capacity-sweep summary CSVs."""

from .render import PlotSpec, load_summary, render

__all__ = ["PlotSpec", "load_summary", "render"]
