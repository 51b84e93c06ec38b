"""
Reading compiled plans
======================

Every query compiles to an algebra tree before it is evaluated.  ``explain``
prints that tree with one operator per line, children indented below their
parent.
"""

from gqe import algebra, compile_text, explain
from gqe.datasets import query

# a single hop: get-vertices for the left node, then an expand along LIKES edges
print(explain(query("expand_out")))

# a variable-length, undirected hop binds a list of edges and needs an all-different
print(explain(query("variable_length")))

# two comma-separated patterns of one MATCH share a single all-different,
# and anonymous elements get fresh names
print(explain(query("multiple_patterns")))

# separate MATCH clauses are joined without a uniqueness filter between them
print(explain(query("non_unique_edges")))

# plans are plain data: walk them, compute schemas, compare them
plan = compile_text(query("query_parts"))
for op in algebra.operators(plan):
    print(f"{algebra.describe(op):60} {algebra.schema_of(op)}")
