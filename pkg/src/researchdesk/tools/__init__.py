"""Tool library: descriptors, schema-validated dispatch, and the six
scholarly-service clients."""

from importlib import resources
from pathlib import Path

from .clients import ToolSettings
from .library import ToolContext, ToolDescriptor, ToolLibrary, ToolResult, build_library
from .transport import FixtureTransport, RequestsTransport, Transport

__all__ = [
    "FixtureTransport",
    "RequestsTransport",
    "ToolContext",
    "ToolDescriptor",
    "ToolLibrary",
    "ToolResult",
    "ToolSettings",
    "Transport",
    "build_library",
    "builtin_fixtures_dir",
]


def builtin_fixtures_dir() -> Path:
    """Directory of the recorded exchanges shipped with the package."""
    return Path(str(resources.files("researchdesk").joinpath("tools/fixtures")))
