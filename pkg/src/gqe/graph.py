"""In-memory property graph and the Graph-JSON loader.

A graph is immutable once built.  Vertices and edges are iterated in id
order (numeric ids numerically, then text ids) so that every evaluation is
reproducible row for row.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Iterable, Mapping

from .errors import GraphFormatError, UnknownElementError
from .values import EdgeRef, Value, VertexRef, from_json, id_key

DIRECTIONS = ("out", "in", "both")


@dataclass(frozen=True)
class PropertyGraph:
    vertices: tuple[str, ...]
    edges: tuple[str, ...]
    st: Mapping[str, tuple[str, str]]
    labels: Mapping[str, frozenset[str]]
    etype: Mapping[str, str]
    vprops: Mapping[str, Mapping[str, Value]]
    eprops: Mapping[str, Mapping[str, Value]]
    _out: Mapping[str, tuple[str, ...]] = field(default=None, compare=False, repr=False)
    _in: Mapping[str, tuple[str, ...]] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        inc: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            s, t = self.st[e]
            out[s].append(e)
            inc[t].append(e)
        object.__setattr__(self, "_out", {v: tuple(es) for v, es in out.items()})
        object.__setattr__(self, "_in", {v: tuple(es) for v, es in inc.items()})

    def __len__(self) -> int:
        return len(self.vertices)

    def has_vertex(self, v: str) -> bool:
        return v in self._out

    def has_edge(self, e: str) -> bool:
        return e in self.st

    def source(self, e: str) -> str:
        return self.st[e][0]

    def target(self, e: str) -> str:
        return self.st[e][1]


def empty_graph() -> PropertyGraph:
    return from_dict({"vertices": [], "edges": []})


def _canonical_id(raw: Any, what: str) -> str:
    if isinstance(raw, bool) or not isinstance(raw, (str, int)):
        raise GraphFormatError(f"{what} id must be a string or integer, got {raw!r}")
    return str(raw)


def _properties(raw: Any, owner: str) -> dict[str, Value]:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise GraphFormatError(f"properties of {owner} must be an object")
    props = {}
    for name, value in raw.items():
        try:
            props[name] = from_json(value)
        except ValueError as exc:
            raise GraphFormatError(f"property {name!r} of {owner}: {exc}") from None
    return props


def from_dict(data: Mapping[str, Any]) -> PropertyGraph:
    """Build a graph from an already decoded Graph-JSON document."""
    if not isinstance(data, Mapping):
        raise GraphFormatError("top level must be an object with 'vertices' and 'edges'")
    raw_vertices = data.get("vertices", [])
    raw_edges = data.get("edges", [])
    if not isinstance(raw_vertices, list) or not isinstance(raw_edges, list):
        raise GraphFormatError("'vertices' and 'edges' must be arrays")

    labels: dict[str, frozenset[str]] = {}
    vprops: dict[str, Mapping[str, Value]] = {}
    for item in raw_vertices:
        if not isinstance(item, dict) or "id" not in item:
            raise GraphFormatError("every vertex needs an 'id'")
        vid = _canonical_id(item["id"], "vertex")
        if vid in labels:
            raise GraphFormatError(f"duplicate vertex id {vid!r}")
        raw_labels = item.get("labels", [])
        if not isinstance(raw_labels, list) or not all(isinstance(x, str) for x in raw_labels):
            raise GraphFormatError(f"labels of vertex {vid!r} must be a list of strings")
        labels[vid] = frozenset(raw_labels)
        vprops[vid] = MappingProxyType(_properties(item.get("properties"), f"vertex {vid!r}"))

    st: dict[str, tuple[str, str]] = {}
    etype: dict[str, str] = {}
    eprops: dict[str, Mapping[str, Value]] = {}
    for item in raw_edges:
        if not isinstance(item, dict) or "id" not in item:
            raise GraphFormatError("every edge needs an 'id'")
        eid = _canonical_id(item["id"], "edge")
        if eid in st:
            raise GraphFormatError(f"duplicate edge id {eid!r}")
        ends = []
        for end in ("source", "target"):
            if end not in item:
                raise GraphFormatError(f"edge {eid!r} has no {end}")
            vid = _canonical_id(item[end], "vertex")
            if vid not in labels:
                raise GraphFormatError(f"edge {eid!r} references unknown vertex {vid!r}")
            ends.append(vid)
        t = item.get("type")
        if isinstance(t, list):
            if len(t) != 1:
                raise GraphFormatError(f"edge {eid!r} must have exactly one type, got {len(t)}")
            t = t[0]
        if not isinstance(t, str) or not t:
            raise GraphFormatError(f"edge {eid!r} must have exactly one type")
        st[eid] = (ends[0], ends[1])
        etype[eid] = t
        eprops[eid] = MappingProxyType(_properties(item.get("properties"), f"edge {eid!r}"))

    return PropertyGraph(
        vertices=tuple(sorted(labels, key=id_key)),
        edges=tuple(sorted(st, key=id_key)),
        st=MappingProxyType(st),
        labels=MappingProxyType(labels),
        etype=MappingProxyType(etype),
        vprops=MappingProxyType(vprops),
        eprops=MappingProxyType(eprops),
    )


def load_graph(source: str) -> PropertyGraph:
    """Parse Graph-JSON text."""
    try:
        data = json.loads(source)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return from_dict(data)


def load_graph_file(path) -> PropertyGraph:
    with open(path, encoding="utf-8") as fh:
        return load_graph(fh.read())


def get_property(g: PropertyGraph, element: VertexRef | EdgeRef, name: str) -> Value:
    """Property value of a vertex or edge; unset properties read as Null."""
    if isinstance(element, VertexRef):
        if element.id not in g.vprops:
            raise UnknownElementError(f"unknown vertex {element.id!r}")
        return g.vprops[element.id].get(name)
    if isinstance(element, EdgeRef):
        if element.id not in g.eprops:
            raise UnknownElementError(f"unknown edge {element.id!r}")
        return g.eprops[element.id].get(name)
    raise TypeError(f"expected a vertex or edge reference, got {element!r}")


def adjacency(
    g: PropertyGraph, v: str, direction: str = "out", types: Iterable[str] = ()
) -> list[tuple[str, str]]:
    """Incident ``(edge, neighbour)`` pairs of ``v``.

    ``both`` is the union of ``out`` and ``in``; a self-loop shows up once.
    An empty ``types`` collection accepts every edge type.
    """
    if not g.has_vertex(v):
        raise UnknownElementError(f"unknown vertex {v!r}")
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    types = frozenset(types)
    pairs = []
    if direction in ("out", "both"):
        pairs.extend((e, g.st[e][1]) for e in g._out[v])
    if direction in ("in", "both"):
        pairs.extend(
            (e, g.st[e][0])
            for e in g._in[v]
            if not (direction == "both" and g.st[e][0] == g.st[e][1])
        )
    if types:
        pairs = [(e, w) for e, w in pairs if g.etype[e] in types]
    return pairs


def vertex_labels(g: PropertyGraph, v: str) -> frozenset[str]:
    if v not in g.labels:
        raise UnknownElementError(f"unknown vertex {v!r}")
    return g.labels[v]


def edge_type(g: PropertyGraph, e: str) -> str:
    if e not in g.etype:
        raise UnknownElementError(f"unknown edge {e!r}")
    return g.etype[e]
