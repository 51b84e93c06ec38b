"""Compile a subset of openCypher to relational graph algebra and evaluate it."""

from __future__ import annotations

from .algebra import render, schema_of, validate
from .compiler import compile_query, determine_grouping_criteria
from .errors import (
    CypherSyntaxError,
    EvaluationError,
    GqeError,
    GraphFormatError,
    SchemaError,
    SemanticError,
    StructureError,
    UnknownElementError,
)
from .evaluator import Relation, evaluate
from .graph import PropertyGraph, from_dict, load_graph, load_graph_file
from .oracle import oracle_enumerate
from .parser import parse
from .values import EdgeRef, VertexRef


def compile_text(text: str):
    """Parse and compile a query string into an algebra tree."""
    return compile_query(parse(text))


def explain(text: str) -> str:
    """Rendered plan of a query string."""
    return render(compile_text(text))


def run(text: str, graph: PropertyGraph) -> Relation:
    """Parse, compile and evaluate a query string over ``graph``."""
    return evaluate(compile_text(text), graph)


__all__ = [
    "CypherSyntaxError", "EdgeRef", "EvaluationError", "GqeError", "GraphFormatError",
    "PropertyGraph", "Relation", "SchemaError", "SemanticError", "StructureError",
    "UnknownElementError", "VertexRef", "compile_query", "compile_text",
    "determine_grouping_criteria", "evaluate", "explain", "from_dict", "load_graph",
    "load_graph_file", "oracle_enumerate", "parse", "render", "run", "schema_of", "validate",
]
