"""Numerical verification lab for radius bounds of nearly stable CMC hypersurfaces."""

__version__ = "0.1.0"

from . import algebra, bounds, discrete, mesh, report, spaceforms  # noqa: F401
