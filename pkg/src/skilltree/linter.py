"""Curriculum rules and guidelines as coded diagnostics.

Graph rules (E101-E106, W201-W204) run through :func:`lint_graph`; teaching
orders written by hand are checked with :func:`check_sequence`.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Sequence

from . import diagnostics as diag
from .diagnostics import Diagnostic, LintConfig
from .graph import (
    CourseSpec,
    CurriculumGraph,
    EdgeKind,
    NodeKind,
    UnresolvedReference,
    closure_mask,
    contents_mask,
)

INTENTIONAL_TAG = "intentional"


def subconcept_closure_masks(graph: CurriculumGraph) -> list[int]:
    """Reachability using Subconcept edges only."""
    masks = [0] * len(graph)
    order = graph.order
    for i in graph.topological_order:
        m = 0
        for e in graph.prerequisite_edges(order[i]):
            if e.kind is EdgeKind.SUBCONCEPT:
                j = graph.position(e.prerequisite)
                m |= masks[j] | (1 << j)
        masks[i] = m
    return masks


def redundant_subconcept_edges(graph: CurriculumGraph) -> list[tuple[str, str]]:
    """Subconcept edges A -> C where C is also reachable through another subconcept of A."""
    masks = subconcept_closure_masks(graph)
    found = []
    for node_id in graph.order:
        subs = graph.prerequisites(node_id, EdgeKind.SUBCONCEPT)
        if len(subs) < 2:
            continue
        # C is never in its own closure, so the union over all siblings is enough
        union = 0
        for s in subs:
            union |= masks[graph.position(s)]
        for s in subs:
            if union >> graph.position(s) & 1:
                found.append((node_id, s))
    return found


def _known_mask(graph: CurriculumGraph, course: CourseSpec) -> int:
    return graph.mask(course.prerequisites) | closure_mask(graph, course.prerequisites)


def lint_graph(
    graph: CurriculumGraph,
    course: CourseSpec | None = None,
    config: LintConfig | None = None,
) -> list[Diagnostic]:
    """Run the rule catalog; course-dependent rules need ``course``."""
    config = config or LintConfig()
    out: list[Diagnostic] = []
    loc = graph.location_of
    nodes = graph.nodes

    for e in graph.edges:
        if nodes[e.dependent].kind is NodeKind.CONCEPT and nodes[e.prerequisite].is_skill:
            out.append(
                diag.make("E101", f"concept {e.dependent} requires skill {e.prerequisite}",
                          (e.dependent, e.prerequisite), graph.edge_location(e))
            )

    for a, c in redundant_subconcept_edges(graph):
        edge = next(e for e in graph.prerequisite_edges(a) if e.prerequisite == c and e.kind is EdgeKind.SUBCONCEPT)
        out.append(
            diag.make("E102", f"{c} is already a subconcept of another subconcept of {a}; drop the direct edge",
                      (a, c), graph.edge_location(edge))
        )

    by_dependents: dict[frozenset[str], list[str]] = defaultdict(list)
    for node in nodes.values():
        if node.kind is not NodeKind.CONCEPT:
            continue
        incoming = graph.dependent_edges(node.id)
        if len(incoming) == 1 and incoming[0].kind is EdgeKind.CONCEPT_REQUIREMENT:
            out.append(
                diag.make("E103", f"concept {node.id} is only used by skill {incoming[0].dependent}; fold it into that skill",
                          (node.id, incoming[0].dependent), loc(node.id))
            )
        if incoming:
            by_dependents[frozenset(e.dependent for e in incoming)].append(node.id)
    for users, group in by_dependents.items():
        if len(group) > 1:
            group = sorted(group)
            out.append(
                diag.make("E104", f"concepts {', '.join(group)} are always required together "
                                  f"(by {', '.join(sorted(users))}); merge them", group, loc(group[0]))
            )

    for node in nodes.values():
        if not node.is_skill:
            continue
        subs = graph.prerequisites(node.id, EdgeKind.SUBSKILL)
        if len(subs) > config.max_subskills:
            out.append(
                diag.make("W201", f"skill {node.id} has {len(subs)} subskills (threshold {config.max_subskills})",
                          (node.id,), loc(node.id))
            )
        if subs and not node.attested_covered:
            out.append(
                diag.make("W204", f"skill {node.id} has subskills but no 'covered' attestation", (node.id,), loc(node.id))
            )

    if course is not None:
        out.extend(_lint_course(graph, course))
    return config.apply(out)


def _lint_course(graph: CurriculumGraph, course: CourseSpec) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    loc = graph.location_of
    nodes = graph.nodes
    for g in course.goals:
        if nodes[g].kind is NodeKind.CONCEPT:
            out.append(diag.make("E106", f"concept {g} is a learning goal of course {course.name!r}; goals must be skills",
                                 (g,), course.location or loc(g)))

    # Loose end: nothing outside the prerequisites needs it, it is no goal, and
    # it does not build on the course contents (that would be follow-up material).
    known = _known_mask(graph, course)
    contents = contents_mask(graph, course)
    goals = set(course.goals)
    for node in nodes.values():
        i = graph.position(node.id)
        if known >> i & 1 or node.id in goals or INTENTIONAL_TAG in node.tags:
            continue
        if graph.closure_masks[i] & contents:
            continue
        if not any(not known >> graph.position(d) & 1 for d in graph.dependents(node.id)):
            out.append(diag.make("E105", f"{node.kind.value} {node.id} is not required by anything in course "
                                         f"{course.name!r} (loose end)", (node.id,), loc(node.id)))

    tested = {s for ex in graph.exercises for s in ex.tests}
    for node_id in sorted(graph.ids(contents & graph.skill_mask)):
        if node_id not in tested:
            out.append(diag.make("W202", f"skill {node_id} is taught but no exercise practices it", (node_id,), loc(node_id)))
    allowed = contents | known
    for ex in graph.exercises:
        for s in sorted(ex.tests):
            if not allowed >> graph.position(s) & 1:
                out.append(diag.make("W203", f"exercise {ex.id} tests skill {s}, which course {course.name!r} "
                                             "neither teaches nor presumes", (ex.id, s), loc(s)))
    return out


def check_sequence(
    graph: CurriculumGraph,
    course: CourseSpec,
    sequence: Iterable[str],
    config: LintConfig | None = None,
) -> list[Diagnostic]:
    """Check a teaching order against the ordering rules and tips."""
    config = config or LintConfig()
    items = list(getattr(sequence, "items", sequence))
    for node_id in items:
        if node_id not in graph:
            raise UnresolvedReference(node_id)
    out: list[Diagnostic] = []
    loc = graph.location_of
    contents = contents_mask(graph, course)
    closures = graph.closure_masks

    pos: dict[str, int] = {}
    for i, node_id in enumerate(items):
        if node_id in pos:
            out.append(diag.make("E304", f"{node_id} appears more than once (positions {pos[node_id] + 1} and {i + 1})",
                                 (node_id,), loc(node_id)))
        else:
            pos[node_id] = i
    for node_id in pos:
        if not contents >> graph.position(node_id) & 1:
            out.append(diag.make("E304", f"{node_id} is not part of course {course.name!r}", (node_id,), loc(node_id)))

    taught = graph.mask(pos)
    for node_id, i in pos.items():
        # extraneous items are reported once, as E304
        for p in sorted(graph.ids(closures[graph.position(node_id)] & taught & contents)):
            if pos[p] > i:
                out.append(diag.make("E301", f"{node_id} is taught before its prerequisite {p}", (node_id, p), loc(node_id)))

    mixed: set[str] = set()
    for node_id in pos:
        if not graph.nodes[node_id].is_skill:
            continue
        for s in graph.prerequisites(node_id, EdgeKind.SUBSKILL):
            if s not in pos and contents >> graph.position(s) & 1:
                mixed.add(s)
                out.append(diag.make("E302", f"{node_id} is taught without first treating its subskill {s}",
                                     (node_id, s), loc(node_id)))
    for node_id in sorted(graph.ids(contents & ~taught)):
        if node_id not in mixed:
            out.append(diag.make("E303", f"course content {node_id} is missing from the sequence", (node_id,), loc(node_id)))

    out.extend(_contiguity_warnings(graph, items, pos))
    out.extend(_concept_order_warnings(graph, pos))
    return config.apply(out)


def _contiguity_warnings(graph: CurriculumGraph, items: Sequence[str], pos: dict[str, int]) -> list[Diagnostic]:
    """A node's fresh prerequisites must be the items right before it.

    Prerequisites already needed by an earlier, unrelated item count as
    taught before and are ignored.
    """
    out = []
    closures = graph.closure_masks
    first = [(node_id, i) for node_id, i in pos.items()]
    for node_id, i in first:
        own = closures[graph.position(node_id)]
        earlier = [m for m, j in first if j < i]
        seen_before = 0
        for m in earlier:
            k = graph.position(m)
            if not own >> k & 1:
                seen_before |= closures[k]
        fresh = [pos[r] for r in graph.ids(own & ~seen_before) if r in pos and pos[r] < i]
        if fresh and min(fresh) < i - len(fresh):
            gap = sorted(m for m, j in first if min(fresh) < j < i and not own >> graph.position(m) & 1)
            out.append(diag.make("W301", f"prerequisites of {node_id} are interrupted by {', '.join(gap)}",
                                 (node_id, *gap), graph.location_of(node_id)))
    return out


def _concept_order_warnings(graph: CurriculumGraph, pos: dict[str, int]) -> list[Diagnostic]:
    out = []
    closures = graph.closure_masks
    by_position = sorted(pos, key=pos.__getitem__)
    for node_id in pos:
        if not graph.nodes[node_id].is_skill:
            continue
        subs = [s for s in graph.prerequisites(node_id, EdgeKind.SUBSKILL) if s in pos]
        for c in graph.prerequisites(node_id, EdgeKind.CONCEPT_REQUIREMENT):
            if c not in pos:
                continue
            bit = 1 << graph.position(c)
            for s in subs:
                if pos[c] > pos[s]:
                    continue
                needed = any(closures[graph.position(m)] & bit for m in by_position[: pos[s] + 1])
                if not needed:
                    out.append(diag.make("W302", f"concept {c} is discussed before subskill {s} of {node_id}",
                                         (node_id, c, s), graph.location_of(node_id)))
                    break
    return out
