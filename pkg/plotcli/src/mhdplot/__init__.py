"""Plotting companion for the sbpmhd solver's CSV output."""

__version__ = "0.1.0"

from .io import SnapshotTable, read_diagnostics  # noqa: F401
from .plots import plot_field, plot_slice, plot_timeseries  # noqa: F401
