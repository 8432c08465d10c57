"""Bundled demo fixtures: a small clustered embedding file and a two-API
knowledge graph (local business search + weather)."""

from importlib import resources
from pathlib import Path

DEMO_VECTORS = "demo_vectors.vec"
DEMO_GRAPH = "yelp_weather.json"


def fixture_path(name: str) -> Path:
    """Filesystem path of a bundled fixture file."""
    return Path(str(resources.files(__package__).joinpath(name)))
