"""
Planning a teaching order
=========================

The planner walks the tree depth first, so every subtree is finished before
the next one starts. A breadth-first order is legal but gets a W301 warning.
"""

from pathlib import Path

from skilltree import check_sequence, load_file, plan_order

HERE = Path(__file__).parent
doc = load_file(HERE / "two_level.ctdl")
course = doc.course()

seq = plan_order(doc.graph, course)
print("planned:", " ".join(seq))  # D E B F G C A

# all basics first, then the intermediate skills
bfs = list("DEFGBCA")
for d in check_sequence(doc.graph, course, bfs):
    print(d.render())

# teaching B before its subskills is an error
print([d.code for d in check_sequence(doc.graph, course, list("BDEFGCA"))])
