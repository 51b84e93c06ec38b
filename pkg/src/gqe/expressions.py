"""Scalar expressions used in selections, projections, grouping and sorting."""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass
from typing import Any, Callable, Iterator, Optional, Union

from .values import Value

AGGREGATES = ("count", "count_distinct", "sum", "avg", "min", "max", "collect")
ARITH_OPS = ("+", "-", "*", "/")
CMP_OPS = ("=", "<>", "<", "<=", ">", ">=")
BOOL_OPS = ("and", "or", "not")


def _literal_key(v: Value) -> Any:
    if isinstance(v, tuple):
        return ("list", tuple(_literal_key(x) for x in v))
    return (type(v).__name__, v)


@dataclass(frozen=True, eq=False)
class Literal:
    value: Value

    # 1, 1.0 and True must stay distinct literals
    def __eq__(self, other):
        return isinstance(other, Literal) and _literal_key(self.value) == _literal_key(other.value)

    def __hash__(self):
        return hash(("Literal", _literal_key(self.value)))


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class PropAccess:
    var: str
    key: str


@dataclass(frozen=True)
class Arith:
    """Binary arithmetic, or unary minus when ``operands`` has one element."""

    op: str
    operands: tuple


@dataclass(frozen=True)
class Cmp:
    op: str
    left: Any
    right: Any


@dataclass(frozen=True)
class BoolOp:
    op: str
    operands: tuple


@dataclass(frozen=True)
class IsNull:
    operand: Any
    negated: bool = False


@dataclass(frozen=True)
class HasLabels:
    """True when the vertex bound to ``var`` carries all of ``labels``."""

    var: str
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(sorted(set(self.labels))))


@dataclass(frozen=True)
class AggCall:
    """Aggregate call; ``arg`` is None for ``count(*)``."""

    fn: str
    arg: Any = None

    def __post_init__(self):
        if self.fn not in AGGREGATES:
            raise ValueError(f"unknown aggregate {self.fn!r}")


@dataclass(frozen=True)
class PatternPredicate:
    """A pattern used as a boolean inside WHERE; never reaches an algebra tree."""

    pattern: Any


Expr = Union[Literal, Var, PropAccess, Arith, Cmp, BoolOp, IsNull, HasLabels, AggCall, PatternPredicate]


def children(expr: Expr) -> tuple:
    if isinstance(expr, (Arith, BoolOp)):
        return expr.operands
    if isinstance(expr, Cmp):
        return (expr.left, expr.right)
    if isinstance(expr, IsNull):
        return (expr.operand,)
    if isinstance(expr, AggCall):
        return () if expr.arg is None else (expr.arg,)
    return ()


def walk(expr: Expr) -> Iterator[Expr]:
    yield expr
    for c in children(expr):
        yield from walk(c)


def transform(expr: Expr, fn: Callable[[Expr], Optional[Expr]]) -> Expr:
    """Rebuild ``expr`` top-down; wherever ``fn`` returns a node it replaces the subtree."""
    replaced = fn(expr)
    if replaced is not None:
        return replaced
    if isinstance(expr, (Arith, BoolOp)):
        return dataclasses.replace(expr, operands=tuple(transform(o, fn) for o in expr.operands))
    if isinstance(expr, Cmp):
        return Cmp(expr.op, transform(expr.left, fn), transform(expr.right, fn))
    if isinstance(expr, IsNull):
        return IsNull(transform(expr.operand, fn), expr.negated)
    if isinstance(expr, AggCall) and expr.arg is not None:
        return AggCall(expr.fn, transform(expr.arg, fn))
    return expr


def free_vars(expr: Expr) -> list[str]:
    """Attribute names an expression reads, in first-use order."""
    names: list[str] = []
    for node in walk(expr):
        name = None
        if isinstance(node, Var):
            name = node.name
        elif isinstance(node, (PropAccess, HasLabels)):
            name = node.var
        if name is not None and name not in names:
            names.append(name)
    return names


def is_aggregate(expr: Expr) -> bool:
    return isinstance(expr, AggCall)


def contains_aggregate(expr: Expr) -> bool:
    return any(isinstance(n, AggCall) for n in walk(expr))


def conjunction(exprs: list) -> Optional[Expr]:
    if not exprs:
        return None
    if len(exprs) == 1:
        return exprs[0]
    return BoolOp("and", tuple(exprs))


def conjuncts(expr: Expr) -> list:
    if isinstance(expr, BoolOp) and expr.op == "and":
        out = []
        for o in expr.operands:
            out.extend(conjuncts(o))
        return out
    return [expr]


# --- rendering --------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def quote_name(name: str) -> str:
    if _IDENT.match(name):
        return name
    return "`" + name.replace("`", "``") + "`"


def render_value(v: Value) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        escaped = v.replace("\\", "\\\\").replace("'", "\\'").replace("\n", "\\n")
        return "'" + escaped + "'"
    if isinstance(v, tuple):
        return "[" + ", ".join(render_value(x) for x in v) + "]"
    return repr(v)


def _operand(expr: Expr) -> str:
    text = render_expr(expr)
    if isinstance(expr, (Arith, Cmp, BoolOp, IsNull)) or (
        isinstance(expr, Literal) and isinstance(expr.value, (int, float)) and expr.value < 0
    ):
        return f"({text})"
    return text


def render_expr(expr: Expr) -> str:
    """Deterministic, unambiguous text for an expression."""
    if isinstance(expr, Literal):
        return render_value(expr.value)
    if isinstance(expr, Var):
        return quote_name(expr.name)
    if isinstance(expr, PropAccess):
        return f"{quote_name(expr.var)}.{quote_name(expr.key)}"
    if isinstance(expr, Arith):
        if len(expr.operands) == 1:
            return f"-{_operand(expr.operands[0])}"
        return f" {expr.op} ".join(_operand(o) for o in expr.operands)
    if isinstance(expr, Cmp):
        return f"{_operand(expr.left)} {expr.op} {_operand(expr.right)}"
    if isinstance(expr, BoolOp):
        if expr.op == "not":
            return f"NOT {_operand(expr.operands[0])}"
        return f" {expr.op.upper()} ".join(_operand(o) for o in expr.operands)
    if isinstance(expr, IsNull):
        return f"{_operand(expr.operand)} IS {'NOT ' if expr.negated else ''}NULL"
    if isinstance(expr, HasLabels):
        return quote_name(expr.var) + "".join(":" + quote_name(l) for l in expr.labels)
    if isinstance(expr, AggCall):
        return f"{expr.fn}({'*' if expr.arg is None else render_expr(expr.arg)})"
    if isinstance(expr, PatternPredicate):
        return "<pattern>"
    raise TypeError(f"not an expression: {expr!r}")
