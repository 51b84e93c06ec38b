"""Relational graph algebra plan trees.

Every operator is an immutable dataclass.  :func:`schema_of` derives the
output attribute list of a tree without touching a graph, :func:`validate`
collects every problem in a tree, and :func:`render` prints the indented
explain text.
"""

from __future__ import annotations

import typing
from dataclasses import dataclass, fields
from typing import Any, Optional

from .errors import SchemaError
from .expressions import (
    AggCall,
    Var,
    contains_aggregate,
    free_vars,
    quote_name,
    render_expr,
    walk,
)

DIRECTION_TAGS = {"out": "↑", "in": "↓", "both": "↕"}


def _label_tuple(items) -> tuple:
    return tuple(sorted(set(items)))


@dataclass(frozen=True)
class GetVertices:
    var: str
    labels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "labels", _label_tuple(self.labels))


@dataclass(frozen=True)
class UnitTable:
    """The relation holding one empty tuple."""


@dataclass(frozen=True)
class Expand:
    """Extend each row along edges from ``v``; ``max_hops=None`` is unbounded."""

    input: Any
    v: str
    w: str
    e: str
    direction: str = "out"
    labels: tuple = ()
    types: tuple = ()
    min_hops: int = 1
    max_hops: Optional[int] = 1

    def __post_init__(self):
        object.__setattr__(self, "labels", _label_tuple(self.labels))
        object.__setattr__(self, "types", _label_tuple(self.types))
        if self.direction not in DIRECTION_TAGS:
            raise ValueError(f"bad direction {self.direction!r}")

    @property
    def single_hop(self) -> bool:
        return self.min_hops == 1 and self.max_hops == 1


@dataclass(frozen=True)
class AllDifferent:
    input: Any
    variables: tuple


@dataclass(frozen=True)
class Unwind:
    input: Any
    expr: Any
    alias: str


@dataclass(frozen=True)
class Selection:
    input: Any
    condition: Any


@dataclass(frozen=True)
class Projection:
    input: Any
    items: tuple  # of (expr, output name)


@dataclass(frozen=True)
class Grouping:
    input: Any
    criteria: tuple
    items: tuple  # of (expr, output name)


@dataclass(frozen=True)
class DuplicateElimination:
    input: Any


@dataclass(frozen=True)
class Sort:
    input: Any
    keys: tuple  # of (expr, "asc" | "desc")


@dataclass(frozen=True)
class Top:
    input: Any
    skip: int = 0
    limit: Optional[int] = None


@dataclass(frozen=True)
class Union:
    left: Any
    right: Any


@dataclass(frozen=True)
class BagUnion:
    left: Any
    right: Any


@dataclass(frozen=True)
class Join:
    left: Any
    right: Any


@dataclass(frozen=True)
class LeftOuterJoin:
    left: Any
    right: Any
    condition: Any = None


AlgebraNode = typing.Union[
    GetVertices, UnitTable, Expand, AllDifferent, Unwind, Selection, Projection, Grouping,
    DuplicateElimination, Sort, Top, Union, BagUnion, Join, LeftOuterJoin,
]

_UNARY = (Expand, AllDifferent, Unwind, Selection, Projection, Grouping, DuplicateElimination, Sort, Top)
_BINARY = (Union, BagUnion, Join, LeftOuterJoin)


def children(node) -> tuple:
    if isinstance(node, _UNARY):
        return (node.input,)
    if isinstance(node, _BINARY):
        return (node.left, node.right)
    return ()


# --- schemas ----------------------------------------------------------------


def _require(names, schema, where):
    missing = [n for n in names if n not in schema]
    if missing:
        raise SchemaError(f"{where}: unknown attribute(s) {', '.join(missing)} (have {list(schema)})")


def _no_duplicates(schema, where):
    seen = set()
    for n in schema:
        if n in seen:
            raise SchemaError(f"{where}: duplicate attribute {n!r}")
        seen.add(n)
    return schema


def schema_of(node) -> tuple:
    """Output attribute names of ``node``; raises SchemaError on inconsistency."""
    match node:
        case GetVertices(var=v):
            return (v,)
        case UnitTable():
            return ()
        case Expand():
            s = schema_of(node.input)
            _require([node.v], s, "expand")
            return _no_duplicates(s + (node.e, node.w), "expand")
        case Unwind():
            s = schema_of(node.input)
            if isinstance(node.expr, Var):
                s = tuple(n for n in s if n != node.expr.name)
            return _no_duplicates(s + (node.alias,), "unwind")
        case Projection(items=items) | Grouping(items=items):
            return _no_duplicates(tuple(name for _, name in items), type(node).__name__.lower())
        case Join() | LeftOuterJoin():
            left, right = schema_of(node.left), schema_of(node.right)
            return left + tuple(n for n in right if n not in left)
        case Union() | BagUnion():
            left, right = schema_of(node.left), schema_of(node.right)
            if left != right:
                raise SchemaError(
                    f"{type(node).__name__.lower()} operands must have the same schema: "
                    f"{list(left)} vs {list(right)}"
                )
            return left
        case AllDifferent() | Selection() | DuplicateElimination() | Sort() | Top():
            return schema_of(node.input)
    raise TypeError(f"not an algebra node: {node!r}")


# --- validation -------------------------------------------------------------


def _expr_problems(expr, schema, where, allow_aggregate=False) -> list[str]:
    out = []
    missing = [n for n in free_vars(expr) if n not in schema]
    if missing:
        out.append(f"{where}: unresolved variable(s) {', '.join(missing)}")
    if allow_aggregate and isinstance(expr, AggCall):
        if expr.arg is not None and contains_aggregate(expr.arg):
            out.append(f"{where}: nested aggregate in {render_expr(expr)}")
    elif contains_aggregate(expr):
        out.append(f"{where}: aggregate not allowed here: {render_expr(expr)}")
    if any(type(n).__name__ == "PatternPredicate" for n in walk(expr)):
        out.append(f"{where}: pattern predicate left in expression")
    return out


def validate(node) -> list[str]:
    """Every problem found in the tree; an empty list means the plan is sound."""
    problems: list[str] = []
    for child in children(node):
        problems.extend(validate(child))
    if problems:
        return problems
    try:
        out_schema = schema_of(node)
    except SchemaError as exc:
        return [str(exc)]
    inp = schema_of(node.input) if isinstance(node, _UNARY) else ()
    match node:
        case Expand():
            if node.min_hops < 0 or (node.max_hops is not None and node.min_hops > node.max_hops):
                problems.append(f"expand: invalid hop range {node.min_hops}..{node.max_hops}")
            if node.e == node.w:
                problems.append("expand: edge and target share a name")
        case AllDifferent():
            missing = [v for v in node.variables if v not in inp]
            if missing:
                problems.append(f"all-different: unknown variable(s) {', '.join(missing)}")
        case Unwind():
            problems += _expr_problems(node.expr, inp, "unwind")
        case Selection():
            problems += _expr_problems(node.condition, inp, "selection")
        case Projection():
            for expr, _ in node.items:
                problems += _expr_problems(expr, inp, "projection")
        case Grouping():
            for expr in node.criteria:
                problems += _expr_problems(expr, inp, "grouping criteria")
            for expr, _ in node.items:
                problems += _expr_problems(expr, inp, "grouping", allow_aggregate=True)
        case Sort():
            for expr, direction in node.keys:
                problems += _expr_problems(expr, inp, "sort")
                if direction not in ("asc", "desc"):
                    problems.append(f"sort: bad direction {direction!r}")
        case Top():
            if node.skip < 0 or (node.limit is not None and node.limit < 0):
                problems.append("top: skip and limit must be non-negative")
        case LeftOuterJoin(condition=cond) if cond is not None:
            problems += _expr_problems(cond, out_schema, "left outer join condition")
    return problems


# --- rendering --------------------------------------------------------------


def _item(expr, name) -> str:
    text = render_expr(expr)
    return text if text == name else f"{text} -> {quote_name(name)}"


def _hops(node: Expand) -> str:
    upper = "" if node.max_hops is None else str(node.max_hops)
    return f"{node.min_hops}..{upper}"


def _label_suffix(labels) -> str:
    return (": " + ":".join(quote_name(l) for l in labels)) if labels else ""


def describe(node) -> str:
    """One-line description of a single operator (no children)."""
    match node:
        case GetVertices():
            return f"GetVertices({quote_name(node.var)}{_label_suffix(node.labels)})"
        case UnitTable():
            return "UnitTable"
        case Expand():
            types = ("|".join(quote_name(t) for t in node.types))
            parts = [
                f"v={quote_name(node.v)}",
                f"w={quote_name(node.w)}{_label_suffix(node.labels)}",
                f"e={quote_name(node.e)}" + (f": {types}" if types else ""),
            ]
            if not node.single_hop:
                parts.append(f"hops={_hops(node)}")
            return f"Expand{DIRECTION_TAGS[node.direction]}({', '.join(parts)})"
        case AllDifferent():
            return f"AllDifferent({', '.join(quote_name(v) for v in node.variables)})"
        case Unwind():
            return f"Unwind({render_expr(node.expr)} -> {quote_name(node.alias)})"
        case Selection():
            return f"Selection({render_expr(node.condition)})"
        case Projection():
            return f"Projection({', '.join(_item(e, n) for e, n in node.items)})"
        case Grouping():
            crit = ", ".join(render_expr(c) for c in node.criteria)
            return f"Grouping[{crit}]({', '.join(_item(e, n) for e, n in node.items)})"
        case DuplicateElimination():
            return "DuplicateElimination"
        case Sort():
            keys = ", ".join(("↑" if d == "asc" else "↓") + render_expr(e) for e, d in node.keys)
            return f"Sort({keys})"
        case Top():
            return f"Top(skip={node.skip}" + ("" if node.limit is None else f", limit={node.limit}") + ")"
        case LeftOuterJoin():
            if node.condition is None:
                return "LeftOuterJoin"
            return f"LeftOuterJoin({render_expr(node.condition)})"
        case Union() | BagUnion() | Join():
            return type(node).__name__
    raise TypeError(f"not an algebra node: {node!r}")


def render(node, indent: str = "  ") -> str:
    """Indented explain text, one operator per line, children below their parent."""
    lines: list[str] = []

    def visit(n, depth):
        lines.append(indent * depth + describe(n))
        for c in children(n):
            visit(c, depth + 1)

    visit(node, 0)
    return "\n".join(lines) + "\n"


def operators(node) -> list:
    """Pre-order list of all nodes in a tree."""
    out = [node]
    for c in children(node):
        out.extend(operators(c))
    return out


def node_fields(node) -> dict:
    return {f.name: getattr(node, f.name) for f in fields(node)}
