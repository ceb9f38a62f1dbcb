"""Spectral structure of covariance matrices of power-weighted edge lengths in random geometric graphs."""

from .errors import RggSpectraError
from .model import ModelParams, RegimeSpec, derive_scalars

__version__ = "0.1.0"

__all__ = ["ModelParams", "RegimeSpec", "RggSpectraError", "derive_scalars", "__version__"]
