"""NDJSON session protocol server for editor clients."""

from .server import DEFAULT_PORT, Session, serve_stream, serve_tcp

__all__ = ["DEFAULT_PORT", "Session", "serve_stream", "serve_tcp"]
