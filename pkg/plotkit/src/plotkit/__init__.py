"""Figure-panel renderer for the exact-diagonalization simulator's CSV
outputs: spectral statistics, entanglement curves, eigenbasis matrix-element
statistics, and occupation heatmaps."""

__version__ = "0.1.0"

from .io import SchemaError, Table, read_table
from .panels import (GAMMA_GAUSSIAN, PANEL_KINDS, R_POISSON, R_WIGNER_DYSON,
                     PanelSpec, build_figure, load_spec, render)
