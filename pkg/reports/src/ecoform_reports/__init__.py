"""Figure rendering for coalition-formation benchmark outputs."""

__version__ = "0.1.0"

from .render import ReportError, ReportSpec, render

__all__ = ["ReportError", "ReportSpec", "render", "__version__"]
