"""Document service for the editor UI: a file-backed workspace exposed
over HTTP/JSON with server-sent change events."""

from .app import create_app
from .workspace import Workspace

__all__ = ["create_app", "Workspace"]
