"""
Exporting
=========

DOT for drawing, JSON for tools, CTDL to normalize a source file and
Markdown for a lesson plan.
"""

from pathlib import Path

from skilltree import from_json, group_blocks, load_file, plan_order, to_ctdl, to_dot, to_json
from skilltree.exporters import to_markdown_plan

HERE = Path(__file__).parent
doc = load_file(HERE / "linear_equation.ctdl")
graph, course = doc.graph, doc.course()

# render with: dot -Tsvg -o tree.svg
print(to_dot(graph, course))

text = to_json(graph)
assert from_json(text) == graph
print(text[:200], "...")

print(to_ctdl(graph, doc.courses))

seq = plan_order(graph, course)
plan = group_blocks(graph, seq, [seq.items[-1]])
print(to_markdown_plan(plan, seq, graph))
