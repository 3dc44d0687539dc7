"""Teaching order by reversed depth-first search over course contents."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from .graph import CourseSpec, CurriculumGraph, EdgeKind, contents_mask, subtree_size


class TieBreak(str, Enum):
    DECLARATION_ORDER = "declaration"
    ID_LEXICOGRAPHIC = "id"


@dataclass(frozen=True)
class PlannerOptions:
    count_concepts_in_subtree_size: bool = True
    tie_break: TieBreak = TieBreak.DECLARATION_ORDER


@dataclass(frozen=True)
class TeachingSequence:
    course_name: str
    items: tuple[str, ...]

    def __iter__(self) -> Iterator[str]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)


class EmptyContents(ValueError):
    pass


def plan_order(
    graph: CurriculumGraph,
    course: CourseSpec,
    options: PlannerOptions | None = None,
) -> TeachingSequence:
    """Post-order DFS from the goals, in goal declaration order.

    Before emitting a node, its untaught in-course prerequisites are visited:
    subskills first, then concepts, each group by descending subtree size
    within the course. A prerequisite shared between parents is taught under
    the first parent that reaches it.
    """
    options = options or PlannerOptions()
    scope = contents_mask(graph, course)
    if not scope:
        raise EmptyContents(f"course {course.name!r} has no contents")

    sizes: dict[str, int] = {}

    def size(node_id: str) -> int:
        if node_id not in sizes:
            sizes[node_id] = subtree_size(graph, node_id, scope, options.count_concepts_in_subtree_size)
        return sizes[node_id]

    if options.tie_break is TieBreak.ID_LEXICOGRAPHIC:
        def tie(node_id: str) -> tuple:
            return (node_id,)
    else:
        def tie(node_id: str) -> tuple:
            return (graph.position(node_id),)

    def visit_order(node_id: str) -> list[str]:
        skills, concepts = [], []
        for e in graph.prerequisite_edges(node_id):
            if not scope >> graph.position(e.prerequisite) & 1:
                continue
            (skills if e.kind is EdgeKind.SUBSKILL else concepts).append(e.prerequisite)
        key = lambda n: (-size(n), *tie(n))  # noqa: E731
        return sorted(skills, key=key) + sorted(concepts, key=key)

    emitted: set[str] = set()
    order: list[str] = []
    for goal in course.goals:
        if goal in emitted or not scope >> graph.position(goal) & 1:
            continue
        stack = [(goal, iter(visit_order(goal)))]
        while stack:
            node_id, pending = stack[-1]
            nxt = next(pending, None)
            if nxt is None:
                stack.pop()
                emitted.add(node_id)
                order.append(node_id)
            elif nxt not in emitted:
                stack.append((nxt, iter(visit_order(nxt))))
    return TeachingSequence(course.name, tuple(order))
