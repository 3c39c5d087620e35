"""HTTP service exposing the optimization engine."""

from .app import create_app

__all__ = ["create_app"]
