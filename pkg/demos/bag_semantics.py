"""
Bags, not sets
==============

Relations keep duplicate rows unless a query asks for them to go away.
"""

from gqe import run
from gqe.cli import render_table
from gqe.datasets import load_social_network
from gqe.evaluator import Relation, eval_bag_union, eval_union

graph = load_social_network()

r = Relation(("x", "y"), [(1, 2), (3, 4)])
s = Relation(("x", "y"), [(1, 2)])
print("bag union:", eval_bag_union(r, s).rows)
print("set union:", eval_union(r, s).rows)

# projection never removes duplicates: two people like message e
print(render_table(run("MATCH (p)-[:LIKES]->(m) RETURN m.language", graph)))
print(render_table(run("MATCH (p)-[:LIKES]->(m) RETURN DISTINCT m.language", graph)))

# UNION removes duplicates across and within its inputs, UNION ALL adds multiplicities
q = "MATCH (m:Message) RETURN m.language AS lang {} MATCH (:Person)-[:LIKES]->(m) RETURN m.language AS lang"
print(render_table(run(q.format("UNION"), graph)))
print(render_table(run(q.format("UNION ALL"), graph)))

# edges are unique within one MATCH, but may repeat across MATCH clauses
within = run("MATCH ()-[k1:KNOWS]->(), ()-[k2:KNOWS]->() RETURN k1, k2", graph)
across = run("MATCH ()-[k1:KNOWS]->() MATCH ()-[k2:KNOWS]->() RETURN k1, k2", graph)
print(f"within one MATCH: {len(within)} rows, across two: {len(across)} rows")

# missing properties read as null, and null never compares equal
print(render_table(run("MATCH (m:Message) RETURN m.name, m.name = m.name AS same, m.name IS NULL AS missing", graph)))
