"""Figure rendering for NAS timer simulation artifact trees."""

from .artifacts import (ArtifactError, Cell, SchemaMismatchError,
                        discover_cells, load_cell)
from .render import FigureFamily, FigureRequest, build_figure, empirical_cdf, render

__all__ = [
    "ArtifactError", "Cell", "SchemaMismatchError", "discover_cells",
    "load_cell", "FigureFamily", "FigureRequest", "build_figure",
    "empirical_cdf", "render",
]
