"""Rendering of recovery-experiment outputs.

Consumes only the documented file formats of the lowrank CLI: the phase-grid
CSV (header ``n,p,r,trial,seed,rel_error,success,status,wall_time_s``) and the
image-recovery JSON (``curve`` list of ``{"p": ..., "rel_error": ...}``).
"""

from .curve import plot_error_curve, read_error_curve
from .heatmap import plot_heatmap, read_grid_csv

__all__ = [
    "plot_error_curve",
    "plot_heatmap",
    "read_error_curve",
    "read_grid_csv",
]
