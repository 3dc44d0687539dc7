"""Split a teaching sequence into class blocks, each anchored on a goal skill."""

from __future__ import annotations

from dataclasses import dataclass
from statistics import mean
from typing import Sequence

from . import diagnostics as diag
from .diagnostics import Diagnostic, LintConfig
from .graph import CurriculumGraph, UnresolvedReference


class GroupingError(ValueError):
    pass


class GoalNotInSequence(GroupingError):
    pass


class GoalOrderMismatch(GroupingError):
    pass


class TrailingUnassignedNodes(GroupingError):
    pass


class GoalNotSkill(GroupingError):
    pass


class FinalItemNotSkill(GroupingError):
    pass


@dataclass(frozen=True)
class Block:
    index: int
    goal: str
    members: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class BalanceMetrics:
    min_size: int
    max_size: int
    mean_size: float
    imbalance_ratio: float
    out_of_bounds: tuple[int, ...]  # 1-based block indexes


@dataclass(frozen=True)
class BlockPlan:
    course_name: str
    blocks: tuple[Block, ...]
    metrics: BalanceMetrics

    @property
    def goals(self) -> tuple[str, ...]:
        return tuple(b.goal for b in self.blocks)


def _items(sequence) -> list[str]:
    return list(getattr(sequence, "items", sequence))


def block_size(graph: CurriculumGraph, block: Block, config: LintConfig) -> int:
    if config.count_concepts_in_block_size:
        return len(block.members)
    return sum(1 for m in block.members if graph.nodes[m].is_skill)


def balance_metrics(
    blocks: Sequence[Block] | BlockPlan,
    graph: CurriculumGraph | None = None,
    config: LintConfig | None = None,
) -> BalanceMetrics:
    """Size statistics of a plan; sizes count skills only if the config says so."""
    config = config or LintConfig()
    blocks = blocks.blocks if isinstance(blocks, BlockPlan) else tuple(blocks)
    if not blocks:
        raise ValueError("a block plan needs at least one block")
    if graph is None or config.count_concepts_in_block_size:
        sizes = [len(b.members) for b in blocks]
    else:
        sizes = [block_size(graph, b, config) for b in blocks]
    lo, hi = min(sizes), max(sizes)
    return BalanceMetrics(
        min_size=lo,
        max_size=hi,
        mean_size=mean(sizes),
        imbalance_ratio=hi / lo if lo else float("inf"),
        out_of_bounds=tuple(b.index for b, s in zip(blocks, sizes) if not config.block_min <= s <= config.block_max),
    )


def balance_diagnostics(plan: BlockPlan, graph: CurriculumGraph | None = None,
                        config: LintConfig | None = None) -> list[Diagnostic]:
    config = config or LintConfig()
    m = plan.metrics
    out = [
        diag.make("W401", f"block {b.index} ({b.goal}) has {len(b.members)} items, "
                          f"outside {config.block_min}..{config.block_max}; imbalance ratio {m.imbalance_ratio:g}",
                  (b.goal,), graph.location_of(b.goal) if graph else None)
        for b in plan.blocks if b.index in m.out_of_bounds
    ]
    return config.apply(out)


def group_blocks(
    graph: CurriculumGraph,
    sequence,
    goals: Sequence[str],
    config: LintConfig | None = None,
) -> BlockPlan:
    """Cut the sequence after each goal; block i runs from after goal i-1 through goal i."""
    items = _items(sequence)
    course_name = getattr(sequence, "course_name", "")
    where = {node_id: i for i, node_id in enumerate(items)}
    cuts = []
    for g in goals:
        if g not in graph:
            raise UnresolvedReference(g)
        if not graph.nodes[g].is_skill:
            raise GoalNotSkill(f"block goal {g} is a concept; block goals must be skills")
        if g not in where:
            raise GoalNotInSequence(f"block goal {g} does not occur in the sequence")
        if cuts and where[g] <= cuts[-1]:
            raise GoalOrderMismatch(f"block goal {g} occurs before the previous block goal {items[cuts[-1]]}")
        cuts.append(where[g])
    if not cuts:
        raise GroupingError("at least one block goal is needed")
    if cuts[-1] != len(items) - 1:
        rest = ", ".join(items[cuts[-1] + 1:])
        raise TrailingUnassignedNodes(f"items after the last block goal {items[cuts[-1]]}: {rest}")
    blocks = []
    start = 0
    for k, cut in enumerate(cuts, 1):
        blocks.append(Block(k, items[cut], tuple(items[start:cut + 1])))
        start = cut + 1
    return BlockPlan(course_name, tuple(blocks), balance_metrics(blocks, graph, config))


def auto_select_goals(graph: CurriculumGraph, sequence, config: LintConfig | None = None) -> list[str]:
    """Greedy block goals aiming at the middle of the size bounds.

    A position can close a block when it holds a skill that needs every
    earlier member of the block. The scan closes a block once it reaches the
    target size at such a position (unless the next item directly depends on
    it), or earlier when waiting would overshoot the upper bound or leave no
    later closing point. A trailing block below the lower bound is merged into
    its predecessor when the merged block is still valid.
    """
    config = config or LintConfig()
    items = _items(sequence)
    if not items:
        raise GroupingError("cannot group an empty sequence")
    if not graph.nodes[items[-1]].is_skill:
        raise FinalItemNotSkill(f"the last item {items[-1]} is a concept; blocks must end in a skill")
    closures = graph.closure_masks
    bit = [1 << graph.position(n) for n in items]
    need = [closures[graph.position(n)] for n in items]
    skill = [graph.nodes[n].is_skill for n in items]
    weight = [1 if (skill[i] or config.count_concepts_in_block_size) else 0 for i in range(len(items))]
    last = len(items) - 1

    def can_close(members: int, i: int) -> bool:
        return skill[i] and members & ~need[i] == 0

    def next_close(members: int, i: int) -> int | None:
        """First j > i at which a block holding ``members`` and items i..j-1 could close."""
        for j in range(i + 1, len(items)):
            members |= bit[j - 1]
            if can_close(members, j):
                return j
        return None

    cuts: list[int] = []
    members, size = 0, 0
    for i in range(len(items)):
        size += weight[i]
        if i == last:
            cuts.append(i)
            break
        if not can_close(members, i):
            members |= bit[i]
            continue
        j = next_close(members, i)
        ahead = size + sum(weight[i + 1:j + 1]) if j is not None else None
        parent_next = graph.position(items[i]) in _direct_prereq_positions(graph, items[i + 1])
        if j is None or ahead > config.block_max or (size >= config.block_target and not parent_next):
            cuts.append(i)
            members, size = 0, 0
        else:
            members |= bit[i]

    if len(cuts) > 1:
        tail = sum(weight[cuts[-2] + 1:])
        merged = 0
        for k in range((cuts[-3] + 1) if len(cuts) > 2 else 0, cuts[-1]):
            merged |= bit[k]
        if tail < config.block_min and can_close(merged, cuts[-1]):
            del cuts[-2]
    return [items[c] for c in cuts]


def _direct_prereq_positions(graph: CurriculumGraph, node_id: str) -> set[int]:
    return {graph.position(p) for p in graph.prerequisites(node_id)}
