"""
Parsing and linting a small algebra tree
========================================

Loads the linear-equation curriculum, prints its diagnostics and shows how a
severity override changes the verdict.
"""

from pathlib import Path

from skilltree import LintConfig, Severity, lint_graph, load_file

HERE = Path(__file__).parent

# parse and build in one go; syntax and build problems land in doc.diagnostics
doc = load_file(HERE / "linear_equation.ctdl")
print(f"{len(doc.graph)} nodes, {len(doc.graph.edges)} edges, {len(doc.graph.exercises)} exercises")

# the course is picked automatically because the file declares just one
course = doc.course()
for d in lint_graph(doc.graph, course):
    print(d.render())

# 'equation' is only used by one skill (E103). Demote it to a warning:
relaxed = LintConfig(severity_overrides={"E103": Severity.WARNING})
print([d.severity.value for d in lint_graph(doc.graph, course, relaxed)])

# W204 (missing coverage attestation) is off by default
strict = LintConfig(disabled=frozenset())
print(sorted({d.code for d in lint_graph(doc.graph, course, strict)}))
