"""
Grouping a sequence into blocks
===============================

Each block ends in a goal skill and holds the prerequisites not taught yet.
"""

from pathlib import Path

from skilltree import auto_select_goals, group_blocks, load_file, plan_order

HERE = Path(__file__).parent
doc = load_file(HERE / "four_blocks.ctdl")
course = doc.course()
seq = plan_order(doc.graph, course)

# declared block goals C, E, H, J; B was taught in block 1 so block 3 skips it
plan = group_blocks(doc.graph, seq, course.declared_block_goals)
for block in plan.blocks:
    print(block.index, block.goal, block.members)
print("imbalance ratio:", plan.metrics.imbalance_ratio)

# let the greedy scan choose: blocks need a skill goal that needs every member
auto = auto_select_goals(doc.graph, seq)
print("auto goals:", auto)
print([len(b) for b in group_blocks(doc.graph, seq, auto).blocks])
