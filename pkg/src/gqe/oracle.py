"""Brute-force pattern matcher used as a differential-testing oracle.

It bypasses the compiler and the algebra operators entirely: each pattern
element is bound by plain nested iteration over the graph's vertex and
edge sets, and direction, types, labels and per-MATCH edge uniqueness are
checked directly on the candidate binding.  Only scalar WHERE expressions
are delegated to the shared expression evaluator.
"""

from __future__ import annotations

from .errors import GqeError
from .evaluator import Relation, eval_expr
from .expressions import PatternPredicate, walk
from .values import EdgeRef, VertexRef


def _connects(g, edge, current, direction):
    """Vertex reached from ``current`` over ``edge``, or None if it does not fit."""
    s, t = g.st[edge]
    if direction in ("out", "both") and s == current:
        return t
    if direction in ("in", "both") and t == current:
        return s
    return None


def _edge_sequences(g, start, rel, used):
    """All (edges, end) walks of rel.min_hops..rel.max_hops distinct edges from ``start``."""
    top = len(g.edges) if rel.max_hops is None else rel.max_hops
    types = set(rel.types)

    def grow(seq, vertex):
        if len(seq) >= rel.min_hops:
            yield tuple(seq), vertex
        if len(seq) == top:
            return
        for e in g.edges:
            if e in seq or e in used:
                continue
            if types and g.etype[e] not in types:
                continue
            nxt = _connects(g, e, vertex, rel.direction)
            if nxt is not None:
                yield from grow(seq + [e], nxt)

    yield from grow([], start)


class _Names:
    def __init__(self):
        self.count = 0

    def anon(self) -> str:
        self.count += 1
        return f"#anon{self.count}"


def _pattern_slots(part, names):
    nodes = [(n.name or names.anon(), n) for n in part.nodes]
    rels = [(r.name or names.anon(), r) for r in part.rels]
    return nodes, rels


def _match_clause(g, binding, patterns):
    """Yield every extension of ``binding`` that matches all ``patterns`` of one MATCH."""

    def vertex_candidates(name, node, b):
        if name in b:
            v = b[name]
            if not isinstance(v, VertexRef):
                return []
            candidates = [v.id]
        else:
            candidates = list(g.vertices)
        return [v for v in candidates if set(node.labels) <= g.labels[v]]

    def bind_pattern(pi, b, used):
        if pi == len(patterns):
            yield b, used
            return
        nodes, rels = patterns[pi]

        def step(k, b, used):
            name, node = nodes[k]
            if k == len(rels):
                yield from bind_pattern(pi + 1, b, used)
                return
            rname, rel = rels[k]
            current = b[name].id
            nname, nnode = nodes[k + 1]
            for edges, end in _rel_bindings(rname, rel, current, b, used):
                value = EdgeRef(edges[0]) if _scalar(rel) else tuple(EdgeRef(e) for e in edges)
                if rname in b and b[rname] != value:
                    continue
                if end not in vertex_candidates(nname, nnode, b):
                    continue
                nb = dict(b)
                nb[rname] = value
                nb[nname] = VertexRef(end)
                yield from step(k + 1, nb, used | set(edges))

        first_name, first = nodes[0]
        for v in vertex_candidates(first_name, first, b):
            nb = dict(b)
            nb[first_name] = VertexRef(v)
            yield from step(0, nb, used)

    # a self-loop walked "both" ways is still a single binding
    def _rel_bindings(rname, rel, current, b, used):
        if _scalar(rel):
            types = set(rel.types)
            for e in g.edges:
                if e in used or (types and g.etype[e] not in types):
                    continue
                end = _connects(g, e, current, rel.direction)
                if end is not None:
                    yield (e,), end
        else:
            yield from _edge_sequences(g, current, rel, used)

    for b, _ in bind_pattern(0, dict(binding), frozenset()):
        yield b


def _scalar(rel) -> bool:
    return rel.min_hops == 1 and rel.max_hops == 1


def oracle_enumerate(matches, g) -> Relation:
    """Bag of bindings of the named variables of ``matches`` over ``g``.

    Anonymous elements are enumerated like named ones (so they contribute
    multiplicity) but are not part of the returned schema.
    """
    names = _Names()
    clauses = []
    schema: list[str] = []
    for clause in matches:
        slots = [_pattern_slots(p, names) for p in clause.patterns]
        for nodes, rels in slots:
            for name, _ in [*nodes, *rels]:
                if not name.startswith("#") and name not in schema:
                    schema.append(name)
        if clause.where is not None and any(isinstance(n, PatternPredicate) for n in walk(clause.where)):
            raise GqeError("the oracle does not support pattern predicates")
        clauses.append((clause, slots))

    bindings = [{}]
    for clause, slots in clauses:
        clause_vars = {name for nodes, rels in slots for name, _ in [*nodes, *rels]}
        nxt = []
        for b in bindings:
            found = []
            for ext in _match_clause(g, b, slots):
                if clause.where is not None:
                    env = {k: ext.get(k) for k in set(ext) | clause_vars}
                    if eval_expr(clause.where, env, g) is not True:
                        continue
                found.append(ext)
            if not found and clause.optional:
                padded = dict(b)
                for name in clause_vars:
                    padded.setdefault(name, None)
                found.append(padded)
            nxt.extend(found)
        bindings = nxt
    return Relation(tuple(schema), [tuple(b.get(n) for n in schema) for b in bindings])


def check_query(ast, g) -> bool | None:
    """Compare a query's MATCH bindings against the compiled pipeline.

    Only single-part queries whose tail is a RETURN are checked; for
    anything else None is returned.
    """
    from .compiler import Compiler
    from .evaluator import evaluate
    from .parser import Return

    if len(ast.singles) != 1 or len(ast.singles[0].parts) != 1:
        return None
    part = ast.singles[0].parts[0]
    if not part.matches or not isinstance(part.tail, Return):
        return None
    if any(c.where is not None and any(isinstance(n, PatternPredicate) for n in walk(c.where)) for c in part.matches):
        return None
    expected = oracle_enumerate(part.matches, g)
    plan = Compiler().compile_match_block(part.matches)
    actual = evaluate(plan, g).reorder(expected.schema)
    return actual.bag_equals(expected)
