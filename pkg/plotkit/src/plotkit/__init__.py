"""plotkit: offline rendering of spinchaos simulation outputs into figures."""

__version__ = "0.1.0"

from .io import SchemaMismatch, manifest_hash, read_csv, read_manifest  # noqa: F401
from .recipes import LAMBDA_COLOR_RANGE, FigureRecipe, render  # noqa: F401
