"""Domain types and core algorithms for Concept/Skill prerequisite graphs.

A :class:`CurriculumGraph` is an immutable DAG. Edges point from the
dependent node to its prerequisite. Reachability is precomputed as Python
integer bitsets indexed by declaration position, which keeps closure
queries cheap on graphs with tens of thousands of edges.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .diagnostics import SourceLocation

RESERVED_WORDS = frozenset(
    {
        "skill", "concept", "exercise", "course", "requires", "uses", "tests",
        "goal", "prerequisite", "tags", "covered",
    }
)
_ID_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
MAX_REPORTED_CYCLES = 10


def is_node_id(text: str) -> bool:
    return bool(_ID_RE.match(text)) and text not in RESERVED_WORDS


class NodeKind(str, Enum):
    SKILL = "skill"
    CONCEPT = "concept"


class EdgeKind(str, Enum):
    SUBSKILL = "subskill"
    SUBCONCEPT = "subconcept"
    CONCEPT_REQUIREMENT = "concept_requirement"


# (dependent kind, prerequisite kind) required by each edge kind
EDGE_ENDPOINTS: dict[EdgeKind, tuple[NodeKind, NodeKind]] = {
    EdgeKind.SUBSKILL: (NodeKind.SKILL, NodeKind.SKILL),
    EdgeKind.SUBCONCEPT: (NodeKind.CONCEPT, NodeKind.CONCEPT),
    EdgeKind.CONCEPT_REQUIREMENT: (NodeKind.SKILL, NodeKind.CONCEPT),
}


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    title: str
    tags: frozenset[str] = frozenset()
    attested_covered: bool = False

    @property
    def is_skill(self) -> bool:
        return self.kind is NodeKind.SKILL


@dataclass(frozen=True)
class Edge:
    dependent: str
    prerequisite: str
    kind: EdgeKind


@dataclass(frozen=True)
class Exercise:
    id: str
    title: str
    tests: frozenset[str]


@dataclass(frozen=True)
class CourseSpec:
    """A course: what students bring along and what they should master."""

    name: str
    goals: tuple[str, ...]
    prerequisites: frozenset[str] = frozenset()
    declared_block_goals: tuple[str, ...] = ()
    location: SourceLocation | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "goals", tuple(self.goals))
        object.__setattr__(self, "prerequisites", frozenset(self.prerequisites))
        object.__setattr__(self, "declared_block_goals", tuple(self.declared_block_goals))
        if not self.goals:
            raise ValueError(f"course {self.name!r} has no learning goals")
        overlap = self.prerequisites.intersection(self.goals)
        if overlap:
            raise ValueError(
                f"course {self.name!r}: {', '.join(sorted(overlap))} listed as both goal and prerequisite"
            )


# Declarations consumed by build_graph.


@dataclass(frozen=True)
class NodeDecl:
    id: str
    kind: NodeKind
    title: str
    tags: tuple[str, ...] = ()
    covered: bool = False
    location: SourceLocation | None = None


@dataclass(frozen=True)
class EdgeDecl:
    dependent: str
    prerequisite: str
    kind: EdgeKind
    location: SourceLocation | None = None


@dataclass(frozen=True)
class ExerciseDecl:
    id: str
    title: str
    tests: tuple[str, ...]
    location: SourceLocation | None = None


class BuildError(ValueError):
    """Declarations do not describe a valid curriculum graph."""

    def __init__(self, message: str, nodes: Sequence[str] = (), location: SourceLocation | None = None):
        super().__init__(message)
        self.nodes = tuple(nodes)
        self.location = location


class UnresolvedReference(BuildError):
    def __init__(self, node_id: str, location: SourceLocation | None = None, context: str = ""):
        suffix = f" in {context}" if context else ""
        super().__init__(f"unknown id {node_id!r}{suffix}", (node_id,), location)
        self.node_id = node_id


class DuplicateId(BuildError):
    def __init__(self, node_id: str, location: SourceLocation | None = None):
        super().__init__(f"id {node_id!r} is declared more than once", (node_id,), location)
        self.node_id = node_id


class EdgeKindViolation(BuildError):
    def __init__(self, edge: EdgeDecl, actual: tuple[NodeKind, NodeKind]):
        want = EDGE_ENDPOINTS[edge.kind]
        super().__init__(
            f"{edge.kind.value} edge {edge.dependent} -> {edge.prerequisite} needs "
            f"{want[0].value} -> {want[1].value}, found {actual[0].value} -> {actual[1].value}",
            (edge.dependent, edge.prerequisite),
            edge.location,
        )
        self.edge = edge
        self.actual = actual


class InvalidDeclaration(BuildError):
    pass


class CycleDetected(BuildError):
    def __init__(self, cycles: Sequence[tuple[str, ...]], location: SourceLocation | None = None):
        self.cycles = tuple(tuple(c) for c in cycles)
        shown = "; ".join(" -> ".join(c + (c[0],)) for c in self.cycles)
        first = self.cycles[0] if self.cycles else ()
        super().__init__(f"prerequisite cycle: {shown}", first, location)


class CurriculumGraph:
    """Immutable prerequisite DAG over skills and concepts plus exercises.

    Build instances with :func:`build_graph`; the constructor assumes its
    inputs were validated.
    """

    def __init__(
        self,
        nodes: Sequence[Node],
        edges: Sequence[Edge],
        exercises: Sequence[Exercise],
        locations: Mapping[str, SourceLocation] | None = None,
        edge_locations: Mapping[Edge, SourceLocation] | None = None,
    ) -> None:
        self._nodes = MappingProxyType({n.id: n for n in nodes})
        self._edges = tuple(edges)
        self._exercises = tuple(exercises)
        self._locations = MappingProxyType(dict(locations or {}))
        self._edge_locations = MappingProxyType(dict(edge_locations or {}))
        self._order = tuple(self._nodes)
        self._index = {node_id: i for i, node_id in enumerate(self._order)}
        prereqs: list[list[Edge]] = [[] for _ in self._order]
        dependents: list[list[Edge]] = [[] for _ in self._order]
        for e in self._edges:
            prereqs[self._index[e.dependent]].append(e)
            dependents[self._index[e.prerequisite]].append(e)
        self._prereqs = tuple(tuple(p) for p in prereqs)
        self._dependents = tuple(tuple(d) for d in dependents)

    # -- plain accessors -------------------------------------------------

    @property
    def nodes(self) -> Mapping[str, Node]:
        """Nodes keyed by id, in declaration order."""
        return self._nodes

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    @property
    def exercises(self) -> tuple[Exercise, ...]:
        return self._exercises

    @property
    def order(self) -> tuple[str, ...]:
        return self._order

    def __len__(self) -> int:
        return len(self._order)

    def __contains__(self, node_id: object) -> bool:
        return node_id in self._nodes

    def __iter__(self) -> Iterator[str]:
        return iter(self._order)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CurriculumGraph):
            return NotImplemented
        return (
            tuple(self._nodes.values()) == tuple(other._nodes.values())
            and set(self._edges) == set(other._edges)
            and set(self._exercises) == set(other._exercises)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"CurriculumGraph({len(self._order)} nodes, {len(self._edges)} edges, {len(self._exercises)} exercises)"

    def node(self, node_id: str) -> Node:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnresolvedReference(node_id) from None

    def position(self, node_id: str) -> int:
        """Declaration index of a node."""
        try:
            return self._index[node_id]
        except KeyError:
            raise UnresolvedReference(node_id) from None

    def location_of(self, node_id: str) -> SourceLocation | None:
        return self._locations.get(node_id)

    def edge_location(self, edge: Edge) -> SourceLocation | None:
        return self._edge_locations.get(edge) or self._locations.get(edge.dependent)

    def prerequisite_edges(self, node_id: str) -> tuple[Edge, ...]:
        """Outgoing edges of ``node_id`` (to its direct prerequisites), declaration order."""
        return self._prereqs[self.position(node_id)]

    def dependent_edges(self, node_id: str) -> tuple[Edge, ...]:
        """Incoming edges of ``node_id`` (from nodes that require it)."""
        return self._dependents[self.position(node_id)]

    def prerequisites(self, node_id: str, kind: EdgeKind | None = None) -> tuple[str, ...]:
        return tuple(e.prerequisite for e in self.prerequisite_edges(node_id) if kind is None or e.kind is kind)

    def dependents(self, node_id: str, kind: EdgeKind | None = None) -> tuple[str, ...]:
        return tuple(e.dependent for e in self.dependent_edges(node_id) if kind is None or e.kind is kind)

    def exercises_for(self, skill_id: str) -> tuple[Exercise, ...]:
        return tuple(ex for ex in self._exercises if skill_id in ex.tests)

    # -- bitset machinery ------------------------------------------------

    def mask(self, ids: Iterable[str]) -> int:
        m = 0
        for node_id in ids:
            m |= 1 << self.position(node_id)
        return m

    def ids(self, mask: int) -> set[str]:
        order = self._order
        bits = bin(mask)[:1:-1]
        return {order[i] for i, b in enumerate(bits) if b == "1"}

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        """Node indices with every prerequisite before its dependents."""
        order = _kahn(len(self._order), self._index, self._edges)
        assert order is not None, "graph was constructed with a cycle"
        return tuple(order)

    @cached_property
    def closure_masks(self) -> tuple[int, ...]:
        """Per node index: bitset of all direct and indirect prerequisites."""
        masks = [0] * len(self._order)
        index = self._index
        for i in self.topological_order:
            m = 0
            for e in self._prereqs[i]:
                j = index[e.prerequisite]
                m |= masks[j] | (1 << j)
            masks[i] = m
        return tuple(masks)

    @cached_property
    def skill_mask(self) -> int:
        return self.mask(n.id for n in self._nodes.values() if n.is_skill)


def _kahn(n: int, index: Mapping[str, int], edges: Iterable[Edge | EdgeDecl]) -> list[int] | None:
    """Prerequisite-first topological order, or None when a cycle exists."""
    indegree = [0] * n
    users: list[list[int]] = [[] for _ in range(n)]
    for e in edges:
        d, p = index[e.dependent], index[e.prerequisite]
        indegree[d] += 1
        users[p].append(d)
    ready = deque(i for i in range(n) if indegree[i] == 0)
    out: list[int] = []
    while ready:
        i = ready.popleft()
        out.append(i)
        for d in users[i]:
            indegree[d] -= 1
            if indegree[d] == 0:
                ready.append(d)
    return out if len(out) == n else None


def _canonical_cycle(cycle: Sequence[str]) -> tuple[str, ...]:
    k = min(range(len(cycle)), key=lambda i: tuple(cycle[i:]) + tuple(cycle[:i]))
    return tuple(cycle[k:]) + tuple(cycle[:k])


def find_cycles(adjacency: Mapping[str, Sequence[str]], limit: int = MAX_REPORTED_CYCLES) -> list[tuple[str, ...]]:
    """Elementary cycles of a directed graph, each as its smallest rotation.

    At most ``limit`` cycles are returned, sorted. Each cycle is found from
    its lexicographically smallest member, exploring only larger members.
    """
    found: list[tuple[str, ...]] = []
    for start in sorted(adjacency):
        path = [start]
        on_path = {start}
        stack = [iter(sorted(adjacency.get(start, ())))]
        while stack and len(found) < limit:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if nxt == start:
                found.append(_canonical_cycle(path))
            elif nxt > start and nxt not in on_path:
                path.append(nxt)
                on_path.add(nxt)
                stack.append(iter(sorted(adjacency.get(nxt, ()))))
        if len(found) >= limit:
            break
    return sorted(found)


def collect_build_errors(
    node_decls: Sequence[NodeDecl],
    edge_decls: Sequence[EdgeDecl],
    exercise_decls: Sequence[ExerciseDecl] = (),
) -> list[BuildError]:
    """Every problem preventing :func:`build_graph`, in a stable order.

    Cycles are only searched for once the declarations are otherwise sound.
    """
    errors: list[BuildError] = []
    kinds: dict[str, NodeKind] = {}
    seen: set[str] = set()
    for d in node_decls:
        if not is_node_id(d.id):
            errors.append(InvalidDeclaration(f"invalid node id {d.id!r}", (d.id,), d.location))
        if not d.title:
            errors.append(InvalidDeclaration(f"node {d.id!r} has an empty title", (d.id,), d.location))
        if d.id in seen:
            errors.append(DuplicateId(d.id, d.location))
        else:
            seen.add(d.id)
            kinds[d.id] = d.kind
    for x in exercise_decls:
        if not is_node_id(x.id):
            errors.append(InvalidDeclaration(f"invalid exercise id {x.id!r}", (x.id,), x.location))
        if x.id in seen:
            errors.append(DuplicateId(x.id, x.location))
        seen.add(x.id)
        if not x.tests:
            errors.append(InvalidDeclaration(f"exercise {x.id!r} tests no skill", (x.id,), x.location))
        for ref in x.tests:
            if ref not in kinds:
                errors.append(UnresolvedReference(ref, x.location, f"exercise {x.id}"))
            elif kinds[ref] is not NodeKind.SKILL:
                errors.append(
                    InvalidDeclaration(f"exercise {x.id!r} tests concept {ref!r}; exercises test skills", (x.id, ref), x.location)
                )

    sound_edges: list[EdgeDecl] = []
    for e in edge_decls:
        ok = True
        for ref in (e.dependent, e.prerequisite):
            if ref not in kinds:
                errors.append(UnresolvedReference(ref, e.location, f"requirements of {e.dependent}"))
                ok = False
        if not ok:
            continue
        if e.dependent == e.prerequisite:
            errors.append(CycleDetected([(e.dependent,)], e.location))
            continue
        actual = (kinds[e.dependent], kinds[e.prerequisite])
        if actual != EDGE_ENDPOINTS[e.kind]:
            errors.append(EdgeKindViolation(e, actual))
            continue
        sound_edges.append(e)

    if errors:
        return errors
    index = {node_id: i for i, node_id in enumerate(kinds)}
    if _kahn(len(index), index, sound_edges) is None:
        adjacency: dict[str, list[str]] = {}
        for e in sound_edges:
            adjacency.setdefault(e.dependent, []).append(e.prerequisite)
        cycles = find_cycles(adjacency)
        loc = next((d.location for d in node_decls if d.id == cycles[0][0]), None)
        errors.append(CycleDetected(cycles, loc))
    return errors


def build_graph(
    node_decls: Sequence[NodeDecl] = (),
    edge_decls: Sequence[EdgeDecl] = (),
    exercise_decls: Sequence[ExerciseDecl] = (),
) -> CurriculumGraph:
    """Validate declarations and freeze them into a graph.

    Duplicate edge declarations collapse to one edge. Raises the first
    :class:`BuildError` reported by :func:`collect_build_errors`.
    """
    errors = collect_build_errors(node_decls, edge_decls, exercise_decls)
    if errors:
        raise errors[0]
    nodes = [Node(d.id, d.kind, d.title, frozenset(d.tags), d.covered) for d in node_decls]
    edges: dict[Edge, SourceLocation | None] = {}
    for e in edge_decls:
        edges.setdefault(Edge(e.dependent, e.prerequisite, e.kind), e.location)
    exercises = [Exercise(x.id, x.title, frozenset(x.tests)) for x in exercise_decls]
    locations = {d.id: d.location for d in node_decls if d.location}
    edge_locations = {e: loc for e, loc in edges.items() if loc}
    return CurriculumGraph(nodes, list(edges), exercises, locations, edge_locations)


def _check_refs(graph: CurriculumGraph, ids: Iterable[str]) -> None:
    for node_id in ids:
        if node_id not in graph:
            raise UnresolvedReference(node_id)


def prerequisite_closure(graph: CurriculumGraph, roots: str | Iterable[str]) -> set[str]:
    """All nodes reachable from ``roots`` (one id or several) through prerequisite edges.

    A root is only included when another root requires it.
    """
    roots = [roots] if isinstance(roots, str) else list(roots)
    _check_refs(graph, roots)
    return graph.ids(closure_mask(graph, roots))


def closure_mask(graph: CurriculumGraph, roots: str | Iterable[str]) -> int:
    masks = graph.closure_masks
    if isinstance(roots, str):
        roots = (roots,)
    m = 0
    for r in roots:
        m |= masks[graph.position(r)]
    return m


def contents_mask(graph: CurriculumGraph, course: CourseSpec) -> int:
    _check_refs(graph, course.goals)
    _check_refs(graph, course.prerequisites)
    reach = graph.mask(course.goals) | closure_mask(graph, course.goals)
    known = graph.mask(course.prerequisites) | closure_mask(graph, course.prerequisites)
    return reach & ~known


def course_contents(graph: CurriculumGraph, course: CourseSpec) -> set[str]:
    """Goals and everything they need, minus prerequisites and what those need."""
    return graph.ids(contents_mask(graph, course))


def subtree_size(graph: CurriculumGraph, node: str, scope: Iterable[str] | int, count_concepts: bool = True) -> int:
    """Size of the part of ``node``'s prerequisite tree inside ``scope``, node included.

    ``scope`` is either an iterable of ids or a bitset from :meth:`CurriculumGraph.mask`.
    """
    i = graph.position(node)
    scope_mask = scope if isinstance(scope, int) else graph.mask(scope)
    inside = graph.closure_masks[i] & scope_mask
    if not count_concepts:
        inside &= graph.skill_mask
    return inside.bit_count() + 1


def elementary_skills(graph: CurriculumGraph) -> set[str]:
    return {
        n.id
        for n in graph.nodes.values()
        if n.is_skill and not graph.prerequisites(n.id, EdgeKind.SUBSKILL)
    }
