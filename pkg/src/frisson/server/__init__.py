"""Stream server: pub/sub routing, persistence, aggregation and live feedback."""

from .app import create_app
from .state import FeedbackTicker, ServerState

__all__ = ["create_app", "ServerState", "FeedbackTicker"]
