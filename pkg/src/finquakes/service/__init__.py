"""HTTP service exposing the simulator for remote clients."""

from .app import app, create_app

__all__ = ["app", "create_app"]
