"""Seeded random graphs, MATCH queries and relations for differential and property testing."""

from __future__ import annotations

import random

from .evaluator import Relation
from .graph import from_dict
from .values import EdgeRef, VertexRef

LABELS = ("A", "B", "C")
TYPES = ("R", "S", "T")
VERTEX_VARS = ("a", "b", "c", "d")
EDGE_VARS = ("r", "s", "t")


def random_graph(rng: random.Random, max_vertices: int = 8, max_edges: int = 12):
    n = rng.randint(1, max_vertices)
    vertices = []
    for i in range(n):
        props = {}
        if rng.random() < 0.7:
            props["x"] = rng.randint(0, 3)
        vertices.append({
            "id": str(i),
            "labels": rng.sample(LABELS, rng.randint(0, 3)),
            "properties": props,
        })
    edges = []
    for j in range(rng.randint(0, max_edges)):
        props = {"w": rng.randint(0, 2)} if rng.random() < 0.6 else {}
        edges.append({
            "id": f"e{j}",
            "source": str(rng.randrange(n)),
            "target": str(rng.randrange(n)),
            "type": rng.choice(TYPES),
            "properties": props,
        })
    return from_dict({"vertices": vertices, "edges": edges})


class _QueryBuilder:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.bound_vertices: list[str] = []
        self.bound_edges: list[str] = []
        self.ranged = 0
        self.named_ranged = 0
        self.rels = 0

    def node(self, local: set, force_name: bool = False) -> str:
        rng = self.rng
        name = ""
        if force_name or rng.random() < 0.75:
            known = sorted(set(self.bound_vertices) | local)
            # favour already-bound names so patterns connect instead of forming products
            name = rng.choice(known) if known and rng.random() < 0.6 else rng.choice(VERTEX_VARS)
            local.add(name)
        labels = "".join(f":{l}" for l in rng.sample(LABELS, rng.choice((0, 0, 0, 0, 0, 1))))
        return f"({name}{labels})"

    def rel(self, local_edges: set, scalar_edges: set) -> str:
        rng = self.rng
        self.rels += 1
        types = "|".join(rng.sample(TYPES, rng.choice((0, 0, 1, 2))))
        rng_range = ""
        name = ""
        if self.ranged < 1 and rng.random() < 0.3:
            # one range per query keeps the brute-force oracle fast
            self.ranged += 1
            lo = rng.randint(0, 2)
            hi = rng.randint(max(lo, 1), 3)
            rng_range = rng.choice((f"*{lo}..{hi}", f"*{hi}", f"*..{hi}", f"*{lo}..{hi}"))
            if rng.random() < 0.5:
                self.named_ranged += 1
                name = f"q{self.named_ranged}"
        elif rng.random() < 0.6:
            candidates = [e for e in EDGE_VARS if e not in local_edges]
            if candidates:
                name = rng.choice(candidates)
                local_edges.add(name)
                scalar_edges.add(name)
        inner = name + (f":{types}" if types else "") + rng_range
        body = f"-[{inner}]-" if inner else rng.choice(("--", "-[]-"))
        return rng.choice((f"{body}>", f"<{body}", body))

    def pattern(self, local: set, local_edges: set, scalar_edges: set) -> str:
        length = self.rng.choice((0, 1, 1, 1, 2, 2))
        parts = [self.node(local, force_name=length == 0 or not (self.bound_vertices or local))]
        for _ in range(length):
            if self.rels >= 4:
                break
            parts.append(self.rel(local_edges, scalar_edges))
            parts.append(self.node(local))
        return "".join(parts)

    def predicate(self, vertices: list, edges: list) -> str:
        rng = self.rng
        options = []
        if vertices:
            v = rng.choice(vertices)
            options += [
                f"{v}.x > {rng.randint(0, 2)}",
                f"{v}.x = {rng.randint(0, 3)}",
                f"{v}.x IS NULL",
                f"{v}.x IS NOT NULL",
                f"{v}:{rng.choice(LABELS)}",
                f"{v}.x <= {v}.x + 1",
            ]
            if len(vertices) > 1:
                a, b = rng.sample(vertices, 2)
                options += [f"{a} <> {b}", f"{a}.x = {b}.x"]
        if edges:
            e = rng.choice(edges)
            options += [f"{e}.w = {rng.randint(0, 2)}", f"{e}.w IS NULL"]
        if not options:
            return "true"
        text = rng.choice(options)
        roll = rng.random()
        if roll < 0.2:
            text = f"NOT {text}"
        elif roll < 0.35:
            text = f"{text} OR {rng.choice(options)}"
        elif roll < 0.5:
            text = f"{text} AND {rng.choice(options)}"
        return text

    def clause(self, optional: bool) -> str:
        rng = self.rng
        local: set = set()
        local_edges: set = set()
        scalar_edges: set = set()
        count = rng.choice((1, 1, 2))
        patterns = [self.pattern(local, local_edges, scalar_edges) for _ in range(count)]
        text = ("OPTIONAL MATCH " if optional else "MATCH ") + ", ".join(patterns)
        self.bound_vertices += [v for v in sorted(local) if v not in self.bound_vertices]
        self.bound_edges += [e for e in sorted(scalar_edges) if e not in self.bound_edges]
        if rng.random() < 0.4:
            text += " WHERE " + self.predicate(self.bound_vertices, self.bound_edges)
        return text


def random_match_query(rng: random.Random) -> tuple[str, list]:
    """MATCH clauses without a RETURN, plus the individual clause texts."""
    q = _QueryBuilder(rng)
    clauses = []
    for i in range(rng.choice((1, 1, 2, 2, 3))):
        optional = i > 0 and rng.random() < 0.3
        clauses.append(q.clause(optional))
    return " ".join(clauses), clauses


def return_all(text: str, schema) -> str:
    return f"{text} RETURN {', '.join(schema)}"


SCALARS = (None, True, False, 0, 1, 2, 2.0, -1, "a", "b", ("a",), (1, 2), VertexRef("1"), EdgeRef("2"))


def random_relation(rng: random.Random, schema, max_rows: int = 6, values=SCALARS) -> Relation:
    rows = [tuple(rng.choice(values) for _ in schema) for _ in range(rng.randint(0, max_rows))]
    return Relation(tuple(schema), rows)


def random_edge_relation(rng: random.Random, schema, max_rows: int = 6) -> Relation:
    """Rows of edge references and short edge lists, as produced by expand."""
    def value():
        if rng.random() < 0.3:
            return tuple(EdgeRef(str(rng.randint(1, 4))) for _ in range(rng.randint(0, 2)))
        return EdgeRef(str(rng.randint(1, 4)))

    rows = [tuple(value() for _ in schema) for _ in range(rng.randint(0, max_rows))]
    return Relation(tuple(schema), rows)
