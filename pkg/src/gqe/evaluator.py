"""Materialising, bag-semantics evaluation of algebra trees over a graph.

Every operator consumes whole input relations and produces a new
:class:`Relation`.  Row order is deterministic (vertices and edges are
visited in id order) but only meaningful downstream of a sort.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import algebra as A
from .errors import EvaluationError, SchemaError
from .expressions import (
    AggCall,
    Arith,
    BoolOp,
    Cmp,
    HasLabels,
    IsNull,
    Literal,
    PropAccess,
    Var,
    render_expr,
)
from .graph import PropertyGraph, adjacency, get_property
from .values import EdgeRef, VertexRef, equals, is_number, kind_name, less_than, row_key, sort_key


@dataclass
class Relation:
    schema: tuple
    rows: list = field(default_factory=list)
    ordered: bool = False

    def __post_init__(self):
        self.schema = tuple(self.schema)
        for row in self.rows:
            if len(row) != len(self.schema):
                raise ValueError(f"row {row!r} does not match schema {self.schema!r}")

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def bag(self) -> Counter:
        return Counter(row_key(r) for r in self.rows)

    def bag_equals(self, other: "Relation") -> bool:
        return self.schema == other.schema and self.bag() == other.bag()

    def index(self, name: str) -> int:
        return self.schema.index(name)

    def column(self, name: str) -> list:
        i = self.index(name)
        return [r[i] for r in self.rows]

    def reorder(self, names) -> "Relation":
        idx = [self.index(n) for n in names]
        return Relation(tuple(names), [tuple(r[i] for i in idx) for r in self.rows], self.ordered)

    def records(self) -> list[dict]:
        return [dict(zip(self.schema, r)) for r in self.rows]


# --- expressions --------------------------------------------------------------


def _and(values) -> Optional[bool]:
    result = True
    for v in values:
        if v is False:
            return False
        if v is None:
            result = None
    return result


def _or(values) -> Optional[bool]:
    result = False
    for v in values:
        if v is True:
            return True
        if v is None:
            result = None
    return result


def _truth(v, where):
    if v is None or isinstance(v, bool):
        return v
    raise EvaluationError(f"{where} expects a boolean, got {kind_name(v)}")


def _arith(op, a, b):
    if a is None or b is None:
        return None
    if op == "+" and isinstance(a, str) and isinstance(b, str):
        return a + b
    if op == "+" and isinstance(a, tuple) and isinstance(b, tuple):
        return a + b
    if not (is_number(a) and is_number(b)):
        raise EvaluationError(f"cannot apply '{op}' to {kind_name(a)} and {kind_name(b)}")
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if b == 0:
        return None
    if isinstance(a, int) and isinstance(b, int):
        q = abs(a) // abs(b)
        return q if (a >= 0) == (b >= 0) else -q
    return a / b


def _compare(op, a, b):
    if op == "=":
        return equals(a, b)
    if op == "<>":
        r = equals(a, b)
        return None if r is None else not r
    if op == "<":
        return less_than(a, b)
    if op == ">":
        return less_than(b, a)
    lt = less_than(a, b) if op == "<=" else less_than(b, a)
    if lt is None:
        return None
    return lt or bool(equals(a, b))


def eval_expr(expr, env: dict, g: PropertyGraph | None = None):
    """Evaluate a scalar expression against one row (``env`` maps names to values)."""
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, Var):
        try:
            return env[expr.name]
        except KeyError:
            raise EvaluationError(f"unbound variable {expr.name!r}") from None
    if isinstance(expr, PropAccess):
        target = eval_expr(Var(expr.var), env, g)
        if target is None:
            return None
        if not isinstance(target, (VertexRef, EdgeRef)):
            raise EvaluationError(f"property access on {kind_name(target)} value {expr.var!r}")
        if g is None:
            raise EvaluationError("property access needs a graph")
        return get_property(g, target, expr.key)
    if isinstance(expr, Arith):
        vals = [eval_expr(o, env, g) for o in expr.operands]
        if len(vals) == 1:
            v = vals[0]
            if v is None:
                return None
            if not is_number(v):
                raise EvaluationError(f"cannot negate {kind_name(v)}")
            return -v
        return _arith(expr.op, vals[0], vals[1])
    if isinstance(expr, Cmp):
        return _compare(expr.op, eval_expr(expr.left, env, g), eval_expr(expr.right, env, g))
    if isinstance(expr, BoolOp):
        if expr.op == "not":
            v = _truth(eval_expr(expr.operands[0], env, g), "NOT")
            return None if v is None else not v
        vals = (_truth(eval_expr(o, env, g), expr.op.upper()) for o in expr.operands)
        return _and(vals) if expr.op == "and" else _or(vals)
    if isinstance(expr, IsNull):
        v = eval_expr(expr.operand, env, g)
        return (v is not None) if expr.negated else (v is None)
    if isinstance(expr, HasLabels):
        v = eval_expr(Var(expr.var), env, g)
        if v is None:
            return None
        if not isinstance(v, VertexRef):
            raise EvaluationError(f"label test on {kind_name(v)} value {expr.var!r}")
        return set(expr.labels) <= g.labels[v.id]
    if isinstance(expr, AggCall):
        raise EvaluationError(f"aggregate {render_expr(expr)} outside of grouping")
    raise EvaluationError(f"cannot evaluate {expr!r}")


def _envs(rel: Relation):
    for row in rel.rows:
        yield dict(zip(rel.schema, row))


# --- operators ----------------------------------------------------------------


def eval_get_vertices(var: str, labels: Iterable[str], g: PropertyGraph) -> Relation:
    wanted = set(labels)
    return Relation((var,), [(VertexRef(v),) for v in g.vertices if wanted <= g.labels[v]])


def eval_unit_table() -> Relation:
    return Relation((), [()])


def _trails(g, start, direction, types, min_hops, max_hops):
    """Edge-distinct walks from ``start`` with min..max hops, as (edges, end) pairs."""
    limit = len(g.edges) if max_hops is None else max_hops
    path: list[str] = []

    def visit(vertex):
        if len(path) >= min_hops:
            yield tuple(path), vertex
        if len(path) >= limit:
            return
        for e, nxt in adjacency(g, vertex, direction, types):
            if e in path:
                continue
            path.append(e)
            yield from visit(nxt)
            path.pop()

    yield from visit(start)


def eval_expand(
    input: Relation, v: str, w: str, e: str, g: PropertyGraph, direction: str = "out",
    labels: Iterable[str] = (), types: Iterable[str] = (), min_hops: int = 1, max_hops: Optional[int] = 1,
) -> Relation:
    if v not in input.schema:
        raise SchemaError(f"expand: {v!r} is not in {input.schema}")
    if e in input.schema or w in input.schema:
        raise SchemaError(f"expand: {e!r}/{w!r} already bound in {input.schema}")
    wanted = set(labels)
    types = tuple(types)
    i = input.index(v)
    rows = []
    single = min_hops == 1 and max_hops == 1
    for row in input.rows:
        start = row[i]
        if not isinstance(start, VertexRef):
            continue
        if single:
            for eid, wid in adjacency(g, start.id, direction, types):
                if wanted <= g.labels[wid]:
                    rows.append(row + (EdgeRef(eid), VertexRef(wid)))
            continue
        for edges, end in _trails(g, start.id, direction, types, min_hops, max_hops):
            if wanted <= g.labels[end]:
                rows.append(row + (tuple(EdgeRef(x) for x in edges), VertexRef(end)))
    return Relation(input.schema + (e, w), rows)


def _edge_ids(value, var):
    if value is None:
        return []
    if isinstance(value, EdgeRef):
        return [value.id]
    if isinstance(value, tuple) and all(isinstance(x, EdgeRef) for x in value):
        return [x.id for x in value]
    raise EvaluationError(f"all-different: {var!r} is bound to {kind_name(value)}, not an edge")


def eval_all_different(input: Relation, variables: Iterable[str]) -> Relation:
    idx = [(input.index(v), v) for v in dict.fromkeys(variables)]
    rows = []
    for row in input.rows:
        ids = [x for i, v in idx for x in _edge_ids(row[i], v)]
        if len(ids) == len(set(ids)):
            rows.append(row)
    return Relation(input.schema, rows, input.ordered)


def eval_selection(input: Relation, predicate, g: PropertyGraph | None = None) -> Relation:
    rows = [
        row for row, env in zip(input.rows, _envs(input))
        if _truth(eval_expr(predicate, env, g), "selection") is True
    ]
    return Relation(input.schema, rows, input.ordered)


def eval_projection(input: Relation, items, g: PropertyGraph | None = None) -> Relation:
    schema = tuple(name for _, name in items)
    rows = [tuple(eval_expr(expr, env, g) for expr, _ in items) for env in _envs(input)]
    return Relation(schema, rows, input.ordered)


def _aggregate(call: AggCall, envs: list, g):
    if call.fn == "count" and call.arg is None:
        return len(envs)
    values = [v for v in (eval_expr(call.arg, env, g) for env in envs) if v is not None]
    fn = call.fn
    if fn == "count":
        return len(values)
    if fn == "count_distinct":
        return len({sort_key(v) for v in values})
    if fn == "collect":
        return tuple(values)
    if fn in ("sum", "avg"):
        bad = [v for v in values if not is_number(v)]
        if bad:
            raise EvaluationError(f"{fn}() over non-numeric value of kind {kind_name(bad[0])}")
        if fn == "sum":
            return sum(values)
        return sum(values) / len(values) if values else None
    if not values:
        return None
    return (min if fn == "min" else max)(values, key=sort_key)


def eval_grouping(input: Relation, criteria, items, g: PropertyGraph | None = None) -> Relation:
    groups: dict[tuple, list] = {}
    for env in _envs(input):
        key = tuple(sort_key(eval_expr(c, env, g)) for c in criteria)
        groups.setdefault(key, []).append(env)
    if not criteria and not groups:
        groups[()] = []
    schema = tuple(name for _, name in items)
    rows = []
    for envs in groups.values():
        row = []
        for expr, _ in items:
            if isinstance(expr, AggCall):
                row.append(_aggregate(expr, envs, g))
            else:
                row.append(eval_expr(expr, envs[0], g))
        rows.append(tuple(row))
    return Relation(schema, rows)


def eval_duplicate_elimination(input: Relation) -> Relation:
    seen = set()
    rows = []
    for row in input.rows:
        k = row_key(row)
        if k not in seen:
            seen.add(k)
            rows.append(row)
    return Relation(input.schema, rows, input.ordered)


def _join_rows(left: Relation, right: Relation):
    shared = [n for n in right.schema if n in left.schema]
    li = [left.index(n) for n in shared]
    ri = [right.index(n) for n in shared]
    extra = [i for i, n in enumerate(right.schema) if n not in left.schema]
    schema = left.schema + tuple(right.schema[i] for i in extra)
    buckets: dict[tuple, list] = {}
    for r in right.rows:
        vals = [r[i] for i in ri]
        if any(v is None for v in vals):
            continue  # Null never joins
        buckets.setdefault(tuple(sort_key(v) for v in vals), []).append(r)

    def matches(lrow):
        vals = [lrow[i] for i in li]
        if any(v is None for v in vals):
            return []
        candidates = buckets.get(tuple(sort_key(v) for v in vals), [])
        # sort_key merges 1 and 1.0; strict equality decides
        return [r for r in candidates if all(equals(lrow[a], r[b]) for a, b in zip(li, ri))]

    return schema, extra, matches


def eval_join(left: Relation, right: Relation) -> Relation:
    schema, extra, matches = _join_rows(left, right)
    rows = [l + tuple(r[i] for i in extra) for l in left.rows for r in matches(l)]
    return Relation(schema, rows)


def eval_left_outer_join(
    left: Relation, right: Relation, condition=None, g: PropertyGraph | None = None
) -> Relation:
    schema, extra, matches = _join_rows(left, right)
    padding = (None,) * len(extra)
    rows = []
    for l in left.rows:
        found = False
        for r in matches(l):
            row = l + tuple(r[i] for i in extra)
            if condition is not None:
                ok = _truth(eval_expr(condition, dict(zip(schema, row)), g), "join condition")
                if ok is not True:
                    continue
            rows.append(row)
            found = True
        if not found:
            rows.append(l + padding)
    return Relation(schema, rows)


def eval_unwind(input: Relation, expr, alias: str, g: PropertyGraph | None = None) -> Relation:
    keep = list(range(len(input.schema)))
    if isinstance(expr, Var):
        keep = [i for i, n in enumerate(input.schema) if n != expr.name]
    schema = tuple(input.schema[i] for i in keep) + (alias,)
    if alias in schema[:-1]:
        raise SchemaError(f"unwind: {alias!r} is already bound")
    rows = []
    for row, env in zip(input.rows, _envs(input)):
        value = eval_expr(expr, env, g)
        if value is None:
            continue
        if not isinstance(value, tuple):
            raise EvaluationError(f"UNWIND expects a list, got {kind_name(value)}")
        base = tuple(row[i] for i in keep)
        rows.extend(base + (x,) for x in value)
    return Relation(schema, rows, input.ordered)


def eval_sort(input: Relation, keys, g: PropertyGraph | None = None) -> Relation:
    decorated = [(row, env) for row, env in zip(input.rows, _envs(input))]
    for expr, direction in reversed(tuple(keys)):
        decorated.sort(key=lambda p: sort_key(eval_expr(expr, p[1], g)), reverse=(direction == "desc"))
    return Relation(input.schema, [row for row, _ in decorated], ordered=True)


def eval_top(input: Relation, skip: int = 0, limit: Optional[int] = None) -> Relation:
    end = None if limit is None else skip + limit
    return Relation(input.schema, input.rows[skip:end], input.ordered)


def eval_bag_union(left: Relation, right: Relation) -> Relation:
    if left.schema != right.schema:
        raise SchemaError(f"bag union of different schemas {left.schema} and {right.schema}")
    return Relation(left.schema, left.rows + right.rows)


def eval_union(left: Relation, right: Relation) -> Relation:
    if left.schema != right.schema:
        raise SchemaError(f"union of different schemas {left.schema} and {right.schema}")
    return eval_duplicate_elimination(Relation(left.schema, left.rows + right.rows))


# --- dispatch -----------------------------------------------------------------


def evaluate(plan, g: PropertyGraph) -> Relation:
    """Evaluate an algebra tree bottom-up over ``g``."""
    match plan:
        case A.GetVertices():
            return eval_get_vertices(plan.var, plan.labels, g)
        case A.UnitTable():
            return eval_unit_table()
        case A.Expand():
            return eval_expand(
                evaluate(plan.input, g), plan.v, plan.w, plan.e, g, plan.direction,
                plan.labels, plan.types, plan.min_hops, plan.max_hops,
            )
        case A.AllDifferent():
            return eval_all_different(evaluate(plan.input, g), plan.variables)
        case A.Unwind():
            return eval_unwind(evaluate(plan.input, g), plan.expr, plan.alias, g)
        case A.Selection():
            return eval_selection(evaluate(plan.input, g), plan.condition, g)
        case A.Projection():
            return eval_projection(evaluate(plan.input, g), plan.items, g)
        case A.Grouping():
            return eval_grouping(evaluate(plan.input, g), plan.criteria, plan.items, g)
        case A.DuplicateElimination():
            return eval_duplicate_elimination(evaluate(plan.input, g))
        case A.Sort():
            return eval_sort(evaluate(plan.input, g), plan.keys, g)
        case A.Top():
            return eval_top(evaluate(plan.input, g), plan.skip, plan.limit)
        case A.Union():
            return eval_union(evaluate(plan.left, g), evaluate(plan.right, g))
        case A.BagUnion():
            return eval_bag_union(evaluate(plan.left, g), evaluate(plan.right, g))
        case A.Join():
            return eval_join(evaluate(plan.left, g), evaluate(plan.right, g))
        case A.LeftOuterJoin():
            return eval_left_outer_join(evaluate(plan.left, g), evaluate(plan.right, g), plan.condition, g)
    raise TypeError(f"not an algebra node: {plan!r}")
