"""Parse + build in one step, with every failure reported as a diagnostic."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import diagnostics as diag
from .diagnostics import Diagnostic
from .graph import (
    BuildError,
    CourseSpec,
    CurriculumGraph,
    CycleDetected,
    DuplicateId,
    EdgeKindViolation,
    NodeKind,
    UnresolvedReference,
    build_graph,
    collect_build_errors,
)
from .parser import ParseResult, parse


@dataclass
class Document:
    parse_result: ParseResult
    graph: CurriculumGraph | None = None
    courses: list[CourseSpec] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.graph is not None and not diag.has_errors(self.diagnostics)

    def course(self, name: str | None = None) -> CourseSpec:
        """Look a course up by name; ``None`` picks the only course, if there is one."""
        if name is None:
            if len(self.courses) != 1:
                raise LookupError(f"file declares {len(self.courses)} courses; select one by name")
            return self.courses[0]
        for c in self.courses:
            if c.name == name:
                return c
        known = ", ".join(repr(c.name) for c in self.courses) or "none"
        raise LookupError(f"no course named {name!r} (declared: {known})")


def build_error_diagnostic(err: BuildError) -> Diagnostic:
    if isinstance(err, UnresolvedReference):
        code = "E010"
    elif isinstance(err, DuplicateId):
        code = "E011"
    elif isinstance(err, CycleDetected):
        code = "E012"
    elif isinstance(err, EdgeKindViolation):
        code = "E101" if err.actual == (NodeKind.CONCEPT, NodeKind.SKILL) else "E013"
    else:
        code = "E014"
    return diag.make(code, str(err), err.nodes, err.location)


def check_course_refs(graph: CurriculumGraph, course: CourseSpec) -> list[Diagnostic]:
    out = []
    for ref in (*course.goals, *sorted(course.prerequisites), *course.declared_block_goals):
        if ref not in graph:
            out.append(diag.make("E010", f"unknown id {ref!r} in course {course.name!r}", (ref,), course.location))
    return out


def load_document(text: str, file_name: str = "<input>") -> Document:
    """Parse and build. The graph is left ``None`` when parsing or building fails."""
    result = parse(text, file_name)
    doc = Document(result, diagnostics=list(result.diagnostics))
    if not result.ok:
        return doc
    errors = collect_build_errors(result.node_decls(), result.edge_decls(), result.exercise_decls())
    if errors:
        doc.diagnostics.extend(build_error_diagnostic(e) for e in errors)
        return doc
    graph = build_graph(result.node_decls(), result.edge_decls(), result.exercise_decls())
    doc.graph = graph
    seen: set[str] = set()
    for course in result.course_specs():
        if course.name in seen:
            doc.diagnostics.append(
                diag.make("E011", f"course {course.name!r} is declared more than once", location=course.location)
            )
            continue
        seen.add(course.name)
        doc.diagnostics.extend(check_course_refs(graph, course))
        doc.courses.append(course)
    return doc


def load_file(path: str | Path) -> Document:
    path = Path(path)
    return load_document(path.read_text(encoding="utf-8"), str(path))
