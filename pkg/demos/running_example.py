"""
Querying a small social network
===============================

Load the bundled graph, run a few queries and print the results.
"""

from gqe import run
from gqe.cli import render_table
from gqe.datasets import load_social_network, query

graph = load_social_network()
print(f"{len(graph.vertices)} vertices, {len(graph.edges)} edges")

# every person with the languages they speak; Daisy speaks none, so she has no rows
print(query("unwind"))
print(render_table(run(query("unwind"), graph)))

# languages spoken, with the number of distinct speakers
print(render_table(run(query("grouping"), graph)))

# two query parts: the first keeps languages used by exactly one message,
# the second looks up what those messages reply to
print(query("query_parts"))
print(render_table(run(query("query_parts"), graph)))

# names in alphabetical order, skipping the first and keeping two
print(render_table(run(query("dedup_sort"), graph)))
