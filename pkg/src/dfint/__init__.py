"""Numerical evaluation of Dotsenko-Fateev type double contour integrals."""

from .errors import DfintError

__version__ = "0.1.0"
__all__ = ["DfintError", "__version__"]
