from .panels import OCC_COLORS, RENDERERS, occupation_color, render
from .schemas import PANEL_KINDS, SCHEMAS, SchemaError, load_table

__version__ = "0.1.0"

__all__ = ["OCC_COLORS", "PANEL_KINDS", "RENDERERS", "SCHEMAS", "SchemaError",
           "load_table", "occupation_color", "render"]
