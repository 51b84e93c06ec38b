"""Bottom-up compilation of parsed queries into relational graph algebra.

Each single query is compiled part by part.  Within a part, patterns
become a get-vertices followed by a chain of expands, comma-separated
patterns of one MATCH are natural-joined, edge uniqueness is enforced per
MATCH by an all-different, and MATCH clauses are combined left-deep with
joins (left outer joins for OPTIONAL MATCH).  The RETURN/WITH tail then adds
grouping or projection, duplicate elimination, sorting, top, the WITH
filter and UNWIND, in that order.  Single queries are combined into a
left-deep tree of (bag) unions.
"""

from __future__ import annotations

from . import algebra as A
from .errors import SchemaError, SemanticError
from .expressions import (
    BoolOp,
    Cmp,
    IsNull,
    PatternPredicate,
    Var,
    conjunction,
    conjuncts,
    contains_aggregate,
    free_vars,
    is_aggregate,
    render_expr,
    transform,
    walk,
)
from .parser import MatchClause, PatternPart, Query, QueryPart, Return, SingleQuery, UnwindOnly


def determine_grouping_criteria(exprs) -> list:
    """Implicit grouping key of a RETURN/WITH item list.

    Items that are an aggregate call at the outermost level contribute
    nothing; items with an aggregate buried inside are illegal; every other
    item becomes a grouping criterion (first appearance wins on repeats).
    """
    criteria: list = []
    for e in exprs:
        if is_aggregate(e):
            if e.arg is not None and contains_aggregate(e.arg):
                raise SemanticError("Illegal use of aggregation function")
            continue
        if contains_aggregate(e):
            raise SemanticError("Illegal use of aggregation function")
        if e not in criteria:
            criteria.append(e)
    return criteria


class Compiler:
    """Stateful compiler; fresh ``_vN`` / ``_eN`` counters span the whole query."""

    def __init__(self):
        self._vertices = 0
        self._edges = 0
        self._kinds: dict[str, str] = {}

    def fresh_vertex(self) -> str:
        self._vertices += 1
        return f"_v{self._vertices}"

    def fresh_edge(self) -> str:
        self._edges += 1
        return f"_e{self._edges}"

    # --- entry points -------------------------------------------------------

    def compile(self, ast: Query):
        trees = [self.compile_single(s) for s in ast.singles]
        tree = trees[0]
        first = A.schema_of(tree)
        for combinator, right in zip(ast.combinators, trees[1:]):
            other = A.schema_of(right)
            if other != first:
                raise SchemaError(
                    f"{combinator} requires the same columns in every single query: "
                    f"{list(first)} vs {list(other)}"
                )
            tree = A.Union(tree, right) if combinator == "UNION" else A.BagUnion(tree, right)
        problems = A.validate(tree)
        if problems:
            raise SemanticError("; ".join(problems))
        return tree

    def compile_single(self, single: SingleQuery):
        self._kinds = {}
        tree = None
        for part in single.parts:
            tree = self.compile_part(part, tree)
        return tree

    # --- patterns -----------------------------------------------------------

    def _declare(self, name: str, kind: str):
        known = self._kinds.get(name)
        if known is not None and known != kind:
            raise SemanticError(f"variable '{name}' is already declared as {'an' if known == 'edge' else 'a'} {known}")
        self._kinds[name] = kind

    def _vertex_name(self, node) -> str:
        if node.name is None:
            return self.fresh_vertex()
        self._declare(node.name, "vertex")
        return node.name

    def _edge_name(self, rel, in_predicate: bool) -> str:
        if rel.name is None:
            return self.fresh_edge()
        if in_predicate:
            raise SemanticError(f"named relationship '{rel.name}' is not supported in a pattern predicate")
        self._declare(rel.name, "edge")
        return rel.name

    def compile_pattern(self, part: PatternPart, in_predicate: bool = False):
        """Get-vertices for the leftmost node, then one expand per relationship."""
        first = self._vertex_name(part.nodes[0])
        tree = A.GetVertices(first, part.nodes[0].labels)
        bound = {first}
        previous = first
        for rel, node in zip(part.rels, part.nodes[1:]):
            e = self._edge_name(rel, in_predicate)
            if e in bound:
                raise SemanticError(f"relationship variable '{e}' is bound twice in one pattern")
            w = self._vertex_name(node)
            target = self.fresh_vertex() if w in bound else w
            tree = A.Expand(
                tree, v=previous, w=target, e=e, direction=rel.direction,
                labels=node.labels, types=rel.types,
                min_hops=rel.min_hops, max_hops=rel.max_hops,
            )
            if target != w:
                # pattern revisits a vertex: bind a fresh copy and require equality
                tree = A.Selection(tree, Cmp("=", Var(w), Var(target)))
            bound |= {e, target}
            previous = w
        return tree

    # --- MATCH blocks -------------------------------------------------------

    def _split_where(self, where):
        plain, positive, negative = [], [], []
        if where is None:
            return plain, positive, negative
        for c in conjuncts(where):
            if isinstance(c, PatternPredicate):
                positive.append(c.pattern)
            elif isinstance(c, BoolOp) and c.op == "not" and isinstance(c.operands[0], PatternPredicate):
                negative.append(c.operands[0].pattern)
            elif any(isinstance(n, PatternPredicate) for n in walk(c)):
                raise SemanticError("pattern predicates are only supported as top-level WHERE conjuncts")
            else:
                plain.append(c)
        return plain, positive, negative

    def compile_clause(self, clause: MatchClause):
        """Patterns of one MATCH joined together under a single all-different."""
        trees = [self.compile_pattern(p) for p in clause.patterns]
        tree = trees[0]
        for t in trees[1:]:
            tree = A.Join(tree, t)
        edges: list[str] = []
        ranged = False
        for t in trees:
            for op in reversed(A.operators(t)):
                if isinstance(op, A.Expand):
                    ranged |= not op.single_hop
                    if op.e not in edges:
                        edges.append(op.e)
        # a lone single-hop edge is trivially unique
        if len(edges) > 1 or ranged:
            tree = A.AllDifferent(tree, tuple(edges))
        return tree

    def compile_match_block(self, matches, prior=None):
        """Combine the MATCH clauses of one query part onto ``prior`` (if any)."""
        acc = prior
        for clause in matches:
            tree = self.compile_clause(clause)
            plain, positive, negative = self._split_where(clause.where)
            if clause.optional:
                if positive or negative:
                    raise SemanticError("pattern predicates are not supported in OPTIONAL MATCH ... WHERE")
                left = acc if acc is not None else A.UnitTable()
                acc = A.LeftOuterJoin(left, tree, conjunction(plain))
                continue
            condition = conjunction(plain)
            if condition is not None and set(free_vars(condition)) <= set(A.schema_of(tree)):
                tree = A.Selection(tree, condition)
                condition = None
            acc = tree if acc is None else A.Join(acc, tree)
            if condition is not None:
                acc = A.Selection(acc, condition)
            for pattern in positive:
                acc = A.Join(acc, self.compile_pattern(pattern, in_predicate=True))
            for pattern in negative:
                ptree = self.compile_pattern(pattern, in_predicate=True)
                fresh = [n for n in A.schema_of(ptree) if n not in A.schema_of(acc)]
                edges = [op.e for op in A.operators(ptree) if isinstance(op, A.Expand)]
                tests = [IsNull(Var(n)) for n in fresh if n in edges] or [IsNull(Var(n)) for n in fresh]
                if not tests:
                    raise SemanticError("negative pattern predicate introduces no new elements")
                acc = A.Selection(A.LeftOuterJoin(acc, ptree), conjunction(tests))
        return acc

    # --- query parts --------------------------------------------------------

    def _items(self, items, base):
        exprs = [it.expr for it in items]
        names = [it.name for it in items]
        if len(set(names)) != len(names):
            dup = next(n for n in names if names.count(n) > 1)
            raise SemanticError(f"column name '{dup}' is used more than once")
        for it in items:
            if any(isinstance(n, PatternPredicate) for n in walk(it.expr)):
                raise SemanticError("pattern predicates are not supported in RETURN/WITH items")
        criteria = determine_grouping_criteria(exprs)
        pairs = tuple(zip(exprs, names))
        if any(is_aggregate(e) for e in exprs):
            return A.Grouping(base, tuple(criteria), pairs)
        return A.Projection(base, pairs)

    @staticmethod
    def _resolve(expr, items, out_schema, where: str):
        """Rewrite ``expr`` to read the output columns of a projection/grouping."""
        by_expr = {}
        for it in items:
            by_expr.setdefault(it.expr, it.name)

        def sub(e):
            if isinstance(e, Var) and e.name in out_schema:
                return e
            name = by_expr.get(e)
            return Var(name) if name is not None else None

        resolved = transform(expr, sub)
        missing = [n for n in free_vars(resolved) if n not in out_schema]
        if missing:
            raise SemanticError(
                f"{where} expression {render_expr(expr)} references names absent from the output: "
                + ", ".join(missing)
            )
        return resolved

    def _scope_after(self, items):
        kinds = {}
        for it in items:
            if isinstance(it.expr, Var) and it.expr.name in self._kinds:
                kinds[it.name] = self._kinds[it.expr.name]
            else:
                kinds[it.name] = "value"
        self._kinds = kinds

    def compile_part(self, part: QueryPart, prior=None):
        tree = self.compile_match_block(part.matches, prior)
        if tree is None:
            tree = A.UnitTable()
        tail = part.tail
        if isinstance(tail, UnwindOnly):
            return self._unwind(tree, tail.unwind)
        tree = self._items(tail.items, tree)
        out_schema = A.schema_of(tree)
        self._scope_after(tail.items)
        if tail.distinct:
            tree = A.DuplicateElimination(tree)
        if isinstance(tail, Return):
            if tail.order_by:
                keys = tuple(
                    (self._resolve(s.expr, tail.items, out_schema, "ORDER BY"), "desc" if s.descending else "asc")
                    for s in tail.order_by
                )
                tree = A.Sort(tree, keys)
            if tail.skip is not None or tail.limit is not None:
                tree = A.Top(tree, tail.skip or 0, tail.limit)
            return tree
        if tail.where is not None:
            if any(isinstance(n, PatternPredicate) for n in walk(tail.where)):
                raise SemanticError("pattern predicates are not supported in WITH ... WHERE")
            tree = A.Selection(tree, self._resolve(tail.where, tail.items, out_schema, "WHERE"))
        if tail.unwind is not None:
            tree = self._unwind(tree, tail.unwind)
        return tree

    def _unwind(self, tree, item):
        missing = [n for n in free_vars(item.expr) if n not in A.schema_of(tree)]
        if missing:
            raise SemanticError(f"UNWIND references unknown variable(s) {', '.join(missing)}")
        self._kinds[item.alias] = "value"
        return A.Unwind(tree, item.expr, item.alias)


def compile_query(ast: Query):
    """Compile a parsed query into a validated algebra tree."""
    return Compiler().compile(ast)


def compile_pattern(part: PatternPart):
    return Compiler().compile_pattern(part)


def compile_text(text: str):
    from .parser import parse

    return compile_query(parse(text))
