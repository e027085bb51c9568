"""Figure regeneration from triphoton CSV sweep files (schema v1).

This package never recomputes physics: every plotted number is read verbatim
from the CSV produced by the engine's command-line interface.
"""

__version__ = "0.1.0"

from .csvio import SchemaError, Table, read_table
from .render import render_fig1, render_fig2

__all__ = ["SchemaError", "Table", "read_table", "render_fig1",
           "render_fig2", "__version__"]
