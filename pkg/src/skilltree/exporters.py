"""DOT, JSON, CTDL and Markdown output. Every writer is byte-deterministic."""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Sequence

from .diagnostics import Diagnostic, Severity, SourceLocation, sort_diagnostics
from .graph import (
    CourseSpec,
    CurriculumGraph,
    EdgeDecl,
    EdgeKind,
    ExerciseDecl,
    NodeDecl,
    NodeKind,
    build_graph,
    contents_mask,
)
from .grouper import BalanceMetrics, Block, BlockPlan
from .parser import quote
from .planner import TeachingSequence

SCHEMA_VERSION = 1


class ExportFormat(str, Enum):
    DOT = "dot"
    JSON = "json"
    CTDL = "ctdl"
    MARKDOWN = "md"


@dataclass(frozen=True)
class ExportOptions:
    format: ExportFormat = ExportFormat.DOT
    include_prerequisite_nodes: bool = True
    highlight_course: str | None = None


class SchemaError(ValueError):
    pass


# -- DOT ----------------------------------------------------------------


def _dot_id(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: CurriculumGraph, course: CourseSpec | None = None, options: ExportOptions | None = None) -> str:
    """Graphviz source; arrows run from prerequisite to dependent.

    With a course, goals get a thick border and prerequisites a dashed one.
    ``include_prerequisite_nodes=False`` limits the drawing to course contents.
    """
    options = options or ExportOptions()
    goals: set[str] = set()
    prereqs: set[str] = set()
    shown = set(graph.order)
    if course is not None:
        goals = set(course.goals)
        prereqs = set(course.prerequisites)
        if not options.include_prerequisite_nodes:
            shown = graph.ids(contents_mask(graph, course))
    name = course.name if course else "curriculum"
    lines = [f"digraph {_dot_id(name)} {{", "  rankdir=BT;"]
    for node_id in sorted(shown):
        node = graph.nodes[node_id]
        attrs = [
            f"label={_dot_id(node.title)}",
            "shape=box" if node.is_skill else "shape=ellipse",
        ]
        if node_id in goals:
            attrs.append("penwidth=2")
        if node_id in prereqs:
            attrs.append("style=dashed")
        lines.append(f"  {_dot_id(node_id)} [{', '.join(attrs)}];")
    edges = sorted(
        (e for e in graph.edges if e.dependent in shown and e.prerequisite in shown),
        key=lambda e: (e.prerequisite, e.dependent, e.kind.value),
    )
    for e in edges:
        style = " [style=dotted]" if e.kind is EdgeKind.CONCEPT_REQUIREMENT else ""
        lines.append(f"  {_dot_id(e.prerequisite)} -> {_dot_id(e.dependent)}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- JSON ---------------------------------------------------------------


def _location_json(loc: SourceLocation | None) -> dict | None:
    return None if loc is None else {"file": loc.file, "line": loc.line, "column": loc.column}


def _graph_payload(graph: CurriculumGraph) -> dict[str, Any]:
    return {
        "nodes": [
            {"id": n.id, "kind": n.kind.value, "title": n.title, "tags": sorted(n.tags), "covered": n.attested_covered}
            for n in graph.nodes.values()
        ],
        "edges": [
            {"from": e.dependent, "to": e.prerequisite, "kind": e.kind.value}
            for e in sorted(graph.edges, key=lambda e: (e.dependent, e.prerequisite, e.kind.value))
        ],
        "exercises": [
            {"id": x.id, "title": x.title, "tests": sorted(x.tests)}
            for x in sorted(graph.exercises, key=lambda x: x.id)
        ],
    }


def _diagnostic_json(d: Diagnostic) -> dict[str, Any]:
    return {
        "code": d.code,
        "severity": d.severity.value,
        "message": d.message,
        "nodes": list(d.nodes),
        "location": _location_json(d.location),
    }


def to_json(payload: CurriculumGraph | TeachingSequence | BlockPlan | Sequence[Diagnostic]) -> str:
    """Versioned JSON document with sorted keys and a trailing newline."""
    if isinstance(payload, CurriculumGraph):
        doc = {"kind": "graph", **_graph_payload(payload)}
    elif isinstance(payload, TeachingSequence):
        doc = {"kind": "sequence", "course": payload.course_name, "items": list(payload.items)}
    elif isinstance(payload, BlockPlan):
        m = payload.metrics
        doc = {
            "kind": "block_plan",
            "course": payload.course_name,
            "blocks": [{"index": b.index, "goal": b.goal, "members": list(b.members)} for b in payload.blocks],
            "metrics": {
                "min": m.min_size,
                "max": m.max_size,
                "mean": m.mean_size,
                "imbalance_ratio": m.imbalance_ratio,
                "out_of_bounds": list(m.out_of_bounds),
            },
        }
    else:
        doc = {"kind": "diagnostics", "diagnostics": [_diagnostic_json(d) for d in sort_diagnostics(payload)]}
    doc["version"] = SCHEMA_VERSION
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _require(obj: Any, fields: dict[str, type | tuple[type, ...]], where: str) -> None:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    missing = set(fields) - set(obj)
    extra = set(obj) - set(fields)
    if missing:
        raise SchemaError(f"{where}: missing field(s) {', '.join(sorted(missing))}")
    if extra:
        raise SchemaError(f"{where}: unknown field(s) {', '.join(sorted(extra))}")
    for key, typ in fields.items():
        value = obj[key]
        types = typ if isinstance(typ, tuple) else (typ,)
        if not isinstance(value, types) or (isinstance(value, bool) and bool not in types):
            raise SchemaError(f"{where}.{key}: wrong type")


def _str_list(value: list, where: str) -> tuple[str, ...]:
    if not all(isinstance(v, str) for v in value):
        raise SchemaError(f"{where}: expected a list of strings")
    return tuple(value)


def _enum(cls, value: str, where: str):
    try:
        return cls(value)
    except ValueError:
        raise SchemaError(f"{where}: unknown value {value!r}") from None


_TOP_FIELDS = {
    "graph": {"version": int, "kind": str, "nodes": list, "edges": list, "exercises": list},
    "sequence": {"version": int, "kind": str, "course": str, "items": list},
    "block_plan": {"version": int, "kind": str, "course": str, "blocks": list, "metrics": dict},
    "diagnostics": {"version": int, "kind": str, "diagnostics": list},
}


def from_json(text: str):
    """Load a document written by :func:`to_json`.

    Graphs are rebuilt through :func:`build_graph`, so hand-edited files get
    the same validation as parsed sources.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"not valid JSON: {err}") from None
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    if doc.get("version") != SCHEMA_VERSION or isinstance(doc.get("version"), bool):
        raise SchemaError(f"unsupported schema version {doc.get('version')!r}; expected {SCHEMA_VERSION}")
    kind = doc.get("kind")
    if kind not in _TOP_FIELDS:
        raise SchemaError(f"unknown document kind {kind!r}")
    _require(doc, _TOP_FIELDS[kind], "$")
    if kind == "graph":
        return _graph_from_json(doc)
    if kind == "sequence":
        return TeachingSequence(doc["course"], _str_list(doc["items"], "$.items"))
    if kind == "block_plan":
        return _plan_from_json(doc)
    return [_diagnostic_from_json(d, f"$.diagnostics[{i}]") for i, d in enumerate(doc["diagnostics"])]


def _graph_from_json(doc: dict) -> CurriculumGraph:
    nodes, edges, exercises = [], [], []
    for i, n in enumerate(doc["nodes"]):
        where = f"$.nodes[{i}]"
        _require(n, {"id": str, "kind": str, "title": str, "tags": list, "covered": bool}, where)
        nodes.append(NodeDecl(n["id"], _enum(NodeKind, n["kind"], where + ".kind"), n["title"],
                              _str_list(n["tags"], where + ".tags"), n["covered"]))
    for i, e in enumerate(doc["edges"]):
        where = f"$.edges[{i}]"
        _require(e, {"from": str, "to": str, "kind": str}, where)
        edges.append(EdgeDecl(e["from"], e["to"], _enum(EdgeKind, e["kind"], where + ".kind")))
    for i, x in enumerate(doc["exercises"]):
        where = f"$.exercises[{i}]"
        _require(x, {"id": str, "title": str, "tests": list}, where)
        exercises.append(ExerciseDecl(x["id"], x["title"], _str_list(x["tests"], where + ".tests")))
    return build_graph(nodes, edges, exercises)


def _plan_from_json(doc: dict) -> BlockPlan:
    blocks = []
    for i, b in enumerate(doc["blocks"]):
        where = f"$.blocks[{i}]"
        _require(b, {"index": int, "goal": str, "members": list}, where)
        blocks.append(Block(b["index"], b["goal"], _str_list(b["members"], where + ".members")))
    m = doc["metrics"]
    _require(m, {"min": int, "max": int, "mean": (int, float), "imbalance_ratio": (int, float),
                 "out_of_bounds": list}, "$.metrics")
    metrics = BalanceMetrics(m["min"], m["max"], m["mean"], m["imbalance_ratio"], tuple(m["out_of_bounds"]))
    return BlockPlan(doc["course"], tuple(blocks), metrics)


def _diagnostic_from_json(d: Any, where: str) -> Diagnostic:
    _require(d, {"code": str, "severity": str, "message": str, "nodes": list, "location": (dict, type(None))}, where)
    loc = d["location"]
    if loc is not None:
        _require(loc, {"file": str, "line": int, "column": int}, where + ".location")
        try:
            loc = SourceLocation(loc["file"], loc["line"], loc["column"])
        except ValueError as err:
            raise SchemaError(f"{where}.location: {err}") from None
    return Diagnostic(d["code"], _enum(Severity, d["severity"], where + ".severity"), d["message"],
                      _str_list(d["nodes"], where + ".nodes"), loc)


# -- CTDL ---------------------------------------------------------------


def _idlist(ids: Iterable[str]) -> str:
    return ", ".join(ids)


def to_ctdl(graph: CurriculumGraph, courses: Sequence[CourseSpec] = ()) -> str:
    """CTDL source that parses back to the same graph and courses."""
    out: list[str] = []
    for node in graph.nodes.values():
        clauses = []
        sub = EdgeKind.SUBSKILL if node.is_skill else EdgeKind.SUBCONCEPT
        requires = graph.prerequisites(node.id, sub)
        uses = graph.prerequisites(node.id, EdgeKind.CONCEPT_REQUIREMENT)
        if requires:
            clauses.append(f"requires: {_idlist(requires)}")
        if uses:
            clauses.append(f"uses: {_idlist(uses)}")
        if node.tags:
            clauses.append(f"tags: {_idlist(sorted(node.tags))}")
        if node.attested_covered:
            clauses.append("covered")
        head = f"{node.kind.value} {node.id} {quote(node.title)}"
        if clauses:
            out.append(head + " {\n" + "".join(f"  {c}\n" for c in clauses) + "}")
        else:
            out.append(head)
    for x in graph.exercises:
        out.append(f"exercise {x.id} {quote(x.title)} {{\n  tests: {_idlist(sorted(x.tests))}\n}}")
    for c in courses:
        clauses = []
        if c.prerequisites:
            clauses.append(f"prerequisite: {_idlist(sorted(c.prerequisites))}")
        clauses.append(f"goal: {_idlist(c.goals)}")
        if c.declared_block_goals:
            clauses.append(f"block-goal: {_idlist(c.declared_block_goals)}")
        out.append(f"course {quote(c.name)} {{\n" + "".join(f"  {cl}\n" for cl in clauses) + "}")
    return "\n".join(out) + "\n" if out else ""


# -- Markdown -----------------------------------------------------------


def to_markdown_plan(plan: BlockPlan, sequence: TeachingSequence | Sequence[str], graph: CurriculumGraph) -> str:
    items = list(getattr(sequence, "items", sequence))
    flat = [m for b in plan.blocks for m in b.members]
    if flat != items:
        raise ValueError("block plan does not partition the given sequence")
    counts: dict[str, list[str]] = {}
    for x in sorted(graph.exercises, key=lambda x: x.id):
        for s in x.tests:
            counts.setdefault(s, []).append(x.id)
    m = plan.metrics
    title = plan.course_name or "course"
    lines = [
        f"# Block plan: {title}",
        "",
        f"{len(plan.blocks)} blocks, sizes {m.min_size}..{m.max_size} (mean {m.mean_size:.2f}, "
        f"imbalance ratio {m.imbalance_ratio:.2f})",
    ]
    for b in plan.blocks:
        goal = graph.nodes[b.goal]
        lines += ["", f"## Block {b.index}: {goal.title}", ""]
        for member in b.members:
            node = graph.nodes[member]
            marker = "skill" if node.is_skill else "concept"
            line = f"1. [{marker}] `{member}` {node.title}"
            if member == b.goal:
                line += " (goal)"
            if node.is_skill:
                ex = counts.get(member, [])
                line += f": {len(ex)} exercise{'s' if len(ex) != 1 else ''}"
                if ex:
                    line += f" ({', '.join(ex)})"
            lines.append(line)
    return "\n".join(lines) + "\n"

