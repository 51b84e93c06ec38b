"""Bundled sample graph and queries."""

from __future__ import annotations

from importlib import resources

from .graph import PropertyGraph, load_graph


def _data():
    return resources.files(__package__).joinpath("data")


def social_network_path():
    """Filesystem path of the bundled social-network graph (as a Traversable)."""
    return _data().joinpath("social_network.json")


def load_social_network() -> PropertyGraph:
    return load_graph(social_network_path().read_text(encoding="utf-8"))


def query_names() -> list[str]:
    return sorted(p.name[: -len(".cypher")] for p in _data().joinpath("queries").iterdir() if p.name.endswith(".cypher"))


def query(name: str) -> str:
    """Text of a bundled query, e.g. ``query("unwind")``."""
    path = _data().joinpath("queries", f"{name}.cypher")
    if not path.is_file():
        raise KeyError(f"no bundled query named {name!r}; known: {', '.join(query_names())}")
    return path.read_text(encoding="utf-8")
