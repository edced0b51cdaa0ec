"""HTTP service wrapping the simulation and experiment drivers."""

from .app import create_app

__all__ = ["create_app"]
