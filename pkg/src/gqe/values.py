"""Runtime values: the atomic domains, lists, NULL and graph element references.

Values are plain Python objects:

========== ===================================
Null       ``None``
Bool       ``bool``
Int        ``int``
Float      ``float``
Text       ``str``
List       ``tuple`` (hashable, may be mixed)
Vertex     :class:`VertexRef`
Edge       :class:`EdgeRef`
========== ===================================
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Union


@dataclass(frozen=True)
class VertexRef:
    id: str

    def __repr__(self) -> str:
        return f"(:{self.id})"


@dataclass(frozen=True)
class EdgeRef:
    id: str

    def __repr__(self) -> str:
        return f"[:{self.id}]"


Value = Union[None, bool, int, float, str, tuple, VertexRef, EdgeRef]


def id_key(element_id: str) -> tuple:
    """Natural ordering for ids: numeric ids numerically, then text ids."""
    if element_id.isdigit():
        return (0, int(element_id), element_id)
    return (1, 0, element_id)


def is_number(v: Any) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def sort_key(v: Value) -> tuple:
    """Total order over values, also used as the structural equality key.

    Bool < numbers < Text < List < Vertex < Edge, with Null after everything.
    Ints and floats share one numeric axis, so ``1`` and ``1.0`` are equal keys.
    """
    t = type(v)
    if t is str:
        return (2, v)
    if t is VertexRef:
        return (4, id_key(v.id))
    if t is EdgeRef:
        return (5, id_key(v.id))
    if v is None:
        return (6,)
    if t is bool:
        return (0, v)
    if t is int or t is float:
        return (1, v)
    if t is tuple:
        return (3, tuple(sort_key(x) for x in v))
    if is_number(v):
        return (1, v)
    raise TypeError(f"not a graph value: {v!r}")


def row_key(row: tuple) -> tuple:
    return tuple(sort_key(v) for v in row)


def kind_name(v: Value) -> str:
    if v is None:
        return "Null"
    if isinstance(v, bool):
        return "Bool"
    if isinstance(v, int):
        return "Int"
    if isinstance(v, float):
        return "Float"
    if isinstance(v, str):
        return "Text"
    if isinstance(v, tuple):
        return "List"
    if isinstance(v, VertexRef):
        return "Vertex"
    if isinstance(v, EdgeRef):
        return "Edge"
    return type(v).__name__


def equals(a: Value, b: Value) -> bool | None:
    """Three-valued equality: Null if either side is Null, False across kinds."""
    if a is None or b is None:
        return None
    if is_number(a) and is_number(b):
        return a == b
    if isinstance(a, tuple) and isinstance(b, tuple):
        if len(a) != len(b):
            return False
        unknown = False
        for x, y in zip(a, b):
            r = equals(x, y)
            if r is False:
                return False
            if r is None:
                unknown = True
        return None if unknown else True
    if kind_name(a) != kind_name(b):
        return False
    return a == b


def less_than(a: Value, b: Value) -> bool | None:
    """Three-valued ``<``; Null when either side is Null or kinds are incomparable."""
    if a is None or b is None:
        return None
    if is_number(a) and is_number(b):
        return a < b
    ka, kb = kind_name(a), kind_name(b)
    if ka != kb or ka in ("Vertex", "Edge"):
        return None
    if ka == "List" and (None in a or None in b):
        return None
    return sort_key(a) < sort_key(b)


def from_json(x: Any) -> Value:
    """Convert a decoded JSON value; arrays become tuples, objects are rejected."""
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, list):
        return tuple(from_json(i) for i in x)
    raise ValueError("map values are not supported")


def to_json(v: Value) -> Any:
    if isinstance(v, tuple):
        return [to_json(x) for x in v]
    if isinstance(v, (VertexRef, EdgeRef)):
        return repr(v)
    return v


def format_value(v: Value, null: str = "") -> str:
    """Text rendering used by the CSV and table emitters."""
    if v is None:
        return null
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return "[" + ", ".join(format_value(x, "null") for x in v) + "]"
    if isinstance(v, (VertexRef, EdgeRef)):
        return repr(v)
    return str(v)
