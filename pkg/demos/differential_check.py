"""
Checking the engine against brute force
=======================================

``oracle_enumerate`` binds pattern variables by trying every vertex and edge
in turn.  It is slow but simple, which makes it a useful reference for the
compiled plans on small random graphs.
"""

import random

from gqe import compile_text, evaluate, explain, oracle_enumerate, parse
from gqe.generators import random_graph, random_match_query, return_all

rng = random.Random(1)
checked = mismatches = 0
for _ in range(200):
    graph = random_graph(rng)
    text, _ = random_match_query(rng)
    matches = parse(text + " RETURN 1 AS one").singles[0].parts[0].matches
    expected = oracle_enumerate(matches, graph)
    actual = evaluate(compile_text(return_all(text, expected.schema)), graph)
    checked += 1
    if not actual.bag_equals(expected):
        mismatches += 1
        print("mismatch:", text)

print(f"{checked} random queries checked, {mismatches} mismatches")

# one of the generated queries and its plan
print(text)
print(explain(return_all(text, expected.schema)))
