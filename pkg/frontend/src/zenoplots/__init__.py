"""Figure rendering for ladder-quench CSV output."""

from .csvdata import Curve, SchemaError, load_glob, read_curve
from .figspec import FigSpecError, FigureSpec, parse_figspec
from .render import RenderResult, render

__version__ = "0.1.0"

__all__ = [
    "Curve", "SchemaError", "load_glob", "read_curve",
    "FigSpecError", "FigureSpec", "parse_figspec",
    "RenderResult", "render",
]
