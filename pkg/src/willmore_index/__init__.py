"""Renormalized second variation and Willmore Morse index of inverted
complete minimal surfaces with finite total curvature."""

from .loglaurent import LogLaurentSeries, QC, ContourResult

__all__ = ["LogLaurentSeries", "QC", "ContourResult"]

__version__ = "0.1.0"
