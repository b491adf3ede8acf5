"""HTTP rating service: serves image pairs, records judgments."""

from .app import create_app
from .config import ServiceConfig
from .core import RatingService

__all__ = ["create_app", "RatingService", "ServiceConfig"]
