"""Simulator and verifier for look-compute-move swarms of opaque robots."""

from .geom import Point, Tolerance, DEFAULT_TOLERANCE
from .model import ALL_MODELS, Configuration, LightClass, ModelId, SyncMode

__version__ = "0.1.0"

__all__ = [
    "ALL_MODELS",
    "Configuration",
    "DEFAULT_TOLERANCE",
    "LightClass",
    "ModelId",
    "Point",
    "SyncMode",
    "Tolerance",
    "__version__",
]
