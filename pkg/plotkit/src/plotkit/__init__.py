"""Render the figure suite (profiles, convergence lines, 2D maps) from
allmach harness CSV output directories.  Pure post-processing: inputs are
never mutated and no solver code is imported."""

from .plots import plot_eoc, plot_field2d, plot_profiles

__all__ = ["plot_profiles", "plot_eoc", "plot_field2d"]

__version__ = "0.1.0"
