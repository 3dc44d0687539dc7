"""Concept/Skill Tree curricula: parse, validate, order and group course contents."""

from .diagnostics import CATALOG, Diagnostic, LintConfig, Severity, SourceLocation
from .document import Document, load_document, load_file
from .exporters import ExportOptions, SchemaError, from_json, to_ctdl, to_dot, to_json, to_markdown_plan
from .graph import (
    BuildError,
    CourseSpec,
    CurriculumGraph,
    CycleDetected,
    DuplicateId,
    Edge,
    EdgeDecl,
    EdgeKind,
    EdgeKindViolation,
    Exercise,
    ExerciseDecl,
    InvalidDeclaration,
    Node,
    NodeDecl,
    NodeKind,
    UnresolvedReference,
    build_graph,
    course_contents,
    elementary_skills,
    prerequisite_closure,
    subtree_size,
)
from .grouper import (
    BalanceMetrics,
    Block,
    BlockPlan,
    GroupingError,
    auto_select_goals,
    balance_diagnostics,
    balance_metrics,
    group_blocks,
)
from .linter import check_sequence, lint_graph
from .parser import LexError, ParseResult, parse, tokenize
from .planner import EmptyContents, PlannerOptions, TeachingSequence, TieBreak, plan_order

__all__ = [
    "auto_select_goals",
    "balance_diagnostics",
    "balance_metrics",
    "BalanceMetrics",
    "Block",
    "BlockPlan",
    "build_graph",
    "BuildError",
    "CATALOG",
    "check_sequence",
    "course_contents",
    "CourseSpec",
    "CurriculumGraph",
    "CycleDetected",
    "Diagnostic",
    "Document",
    "DuplicateId",
    "Edge",
    "EdgeDecl",
    "EdgeKind",
    "EdgeKindViolation",
    "elementary_skills",
    "EmptyContents",
    "Exercise",
    "ExerciseDecl",
    "ExportOptions",
    "from_json",
    "group_blocks",
    "GroupingError",
    "InvalidDeclaration",
    "LexError",
    "lint_graph",
    "LintConfig",
    "load_document",
    "load_file",
    "Node",
    "NodeDecl",
    "NodeKind",
    "parse",
    "ParseResult",
    "plan_order",
    "PlannerOptions",
    "prerequisite_closure",
    "SchemaError",
    "Severity",
    "SourceLocation",
    "subtree_size",
    "TeachingSequence",
    "TieBreak",
    "to_ctdl",
    "to_dot",
    "to_json",
    "to_markdown_plan",
    "tokenize",
    "UnresolvedReference",
]

__version__ = "0.1.0"
