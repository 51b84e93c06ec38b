"""``gqe`` command: run or explain a query over a Graph-JSON file."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .algebra import render
from .compiler import compile_query
from .errors import CypherSyntaxError, EvaluationError, GraphFormatError, SemanticError, UnknownElementError
from .evaluator import Relation, evaluate
from .graph import load_graph_file
from .oracle import check_query
from .parser import parse
from .values import format_value, to_json

NULL_CELL = "∅"


def render_csv(rel: Relation) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(rel.schema)
    for row in rel.rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def render_json(rel: Relation) -> str:
    records = [{k: to_json(v) for k, v in zip(rel.schema, row)} for row in rel.rows]
    return json.dumps(records, ensure_ascii=False, indent=2) + "\n"


def render_table(rel: Relation) -> str:
    cells = [list(rel.schema)] + [[format_value(v, NULL_CELL) for v in row] for row in rel.rows]
    widths = [max((len(r[i]) for r in cells), default=0) for i in range(len(rel.schema))]

    def line(r):
        return "| " + " | ".join(c.ljust(w) for c, w in zip(r, widths)) + " |"

    rule = "+-" + "-+-".join("-" * w for w in widths) + "-+"
    out = [rule, line(cells[0]), rule, *(line(r) for r in cells[1:]), rule]
    n = len(rel.rows)
    out.append(f"({n} row{'s' if n != 1 else ''})")
    return "\n".join(out) + "\n"


RENDERERS = {"table": render_table, "csv": render_csv, "json": render_json}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gqe", description="Evaluate a Cypher query over a property graph.")
    p.add_argument("--graph", required=True, help="Graph-JSON file")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--query", metavar="PATH", help="file holding the query text")
    source.add_argument("-e", dest="text", metavar="TEXT", help="query text")
    p.add_argument("--explain", action="store_true", help="print the compiled plan instead of results")
    p.add_argument("--format", choices=sorted(RENDERERS), default="table")
    p.add_argument("--oracle", action="store_true", help="cross-check MATCH bindings with the brute-force matcher")
    return p


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.query is not None:
            with open(args.query, encoding="utf-8") as fh:
                text = fh.read()
        else:
            text = args.text
        ast = parse(text)
        plan = compile_query(ast)
        if args.explain:
            sys.stdout.write(render(plan))
            return 0
        graph = load_graph_file(args.graph)
        result = evaluate(plan, graph)
        sys.stdout.write(RENDERERS[args.format](result))
        if args.oracle:
            verdict = check_query(ast, graph)
            label = "SKIPPED (only single-part MATCH ... RETURN queries)" if verdict is None else (
                "MATCH" if verdict else "MISMATCH")
            print(f"oracle: {label}", file=sys.stderr)
            if verdict is False:
                return 1
        return 0
    except (CypherSyntaxError, SemanticError, EvaluationError, UnknownElementError) as exc:
        return _fail(str(exc), 1)
    except GraphFormatError as exc:
        return _fail(str(exc), 2)
    except OSError as exc:
        return _fail(f"{exc.filename or ''}: {exc.strerror or exc}".lstrip(": "), 2)


if __name__ == "__main__":
    sys.exit(main())
