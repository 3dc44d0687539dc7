"""Coded findings shared by the parser, graph builder, linter and grouper."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Mapping


@dataclass(frozen=True, order=True)
class SourceLocation:
    file: str
    line: int
    column: int

    def __post_init__(self) -> None:
        if self.line < 1 or self.column < 1:
            raise ValueError(f"line and column are 1-based, got {self.line}:{self.column}")

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Rule:
    code: str
    name: str
    severity: Severity
    summary: str


_E, _W = Severity.ERROR, Severity.WARNING

CATALOG: dict[str, Rule] = {
    rule.code: rule
    for rule in [
        # front end
        Rule("E001", "syntax-error", _E, "statement does not match the grammar"),
        Rule("E002", "lexical-error", _E, "illegal character or malformed string"),
        Rule("W001", "duplicate-edge", _W, "the same prerequisite is declared twice"),
        # graph construction
        Rule("E010", "unresolved-reference", _E, "reference to an undeclared id"),
        Rule("E011", "duplicate-id", _E, "id declared more than once"),
        Rule("E012", "cycle", _E, "prerequisite relation is cyclic"),
        Rule("E013", "edge-kind-violation", _E, "edge endpoints have the wrong kinds"),
        Rule("E014", "invalid-declaration", _E, "declaration violates a field constraint"),
        # curriculum rules
        Rule("E101", "concept-requires-skill", _E, "a concept depends on a skill"),
        Rule("E102", "redundant-subconcept-edge", _E, "subconcept is already implied by another subconcept"),
        Rule("E103", "single-use-concept", _E, "concept required by exactly one skill and nothing else"),
        Rule("E104", "equivalent-concepts", _E, "concepts always required together"),
        Rule("E105", "loose-end", _E, "node not required by anything in the course"),
        Rule("E106", "concept-as-goal", _E, "a concept is listed as a learning goal"),
        Rule("W201", "too-many-subskills", _W, "skill has more direct subskills than the threshold"),
        Rule("W202", "skill-without-exercise", _W, "taught skill has no practice exercise"),
        Rule("W203", "exercise-tests-out-of-scope", _W, "exercise tests a skill the course does not cover"),
        Rule("W204", "uncovered-attestation", _W, "composite skill lacks the coverage attestation"),
        # teaching order
        Rule("E301", "ordering-inconsistency", _E, "node taught before one of its prerequisites"),
        Rule("E302", "mixing", _E, "skill taught without first teaching a subskill"),
        Rule("E303", "incomplete-sequence", _E, "course content missing from the sequence"),
        Rule("E304", "extraneous", _E, "sequence item is not course content"),
        Rule("W301", "non-dfs-contiguity", _W, "prerequisites not taught right before the node"),
        Rule("W302", "concepts-before-subskills", _W, "concept discussed before the skill's subskills"),
        # blocks
        Rule("W401", "unbalanced-blocks", _W, "block size outside the configured bounds"),
    ]
}


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: Severity
    message: str
    nodes: tuple[str, ...] = ()
    location: SourceLocation | None = None

    def sort_key(self) -> tuple:
        loc = self.location
        return (
            self.code,
            self.nodes[0] if self.nodes else "",
            (loc.file, loc.line, loc.column) if loc else ("", 0, 0),
            self.nodes,
            self.message,
        )

    def render(self, color: bool = False) -> str:
        where = str(self.location) if self.location else "-"
        severity = self.severity.value
        if color:
            severity = ("\x1b[31m" if self.severity is Severity.ERROR else "\x1b[33m") + severity + "\x1b[0m"
        text = f"{severity} {self.code} {where} {self.message}"
        if self.nodes:
            text += f" [nodes: {', '.join(self.nodes)}]"
        return text


def make(
    code: str,
    message: str,
    nodes: Iterable[str] = (),
    location: SourceLocation | None = None,
) -> Diagnostic:
    """Build a diagnostic with the catalog severity for ``code``."""
    return Diagnostic(code, CATALOG[code].severity, message, tuple(nodes), location)


def sort_diagnostics(diagnostics: Iterable[Diagnostic]) -> list[Diagnostic]:
    return sorted(diagnostics, key=Diagnostic.sort_key)


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)


@dataclass(frozen=True)
class LintConfig:
    """Thresholds and severity policy for linting and block balancing."""

    severity_overrides: Mapping[str, Severity] = field(default_factory=dict)
    disabled: frozenset[str] = frozenset({"W204"})
    max_subskills: int = 5
    block_min: int = 3
    block_max: int = 6
    count_concepts_in_block_size: bool = True

    def __post_init__(self) -> None:
        if self.max_subskills < 1:
            raise ValueError("max_subskills must be positive")
        if not 1 <= self.block_min <= self.block_max:
            raise ValueError(f"block bounds must satisfy 1 <= min <= max, got {self.block_min}..{self.block_max}")
        unknown = (set(self.severity_overrides) | set(self.disabled)) - set(CATALOG)
        if unknown:
            raise ValueError(f"unknown diagnostic code(s): {', '.join(sorted(unknown))}")

    @property
    def block_target(self) -> int:
        return (self.block_min + self.block_max) // 2

    def apply(self, diagnostics: Iterable[Diagnostic]) -> list[Diagnostic]:
        """Drop disabled codes, apply severity overrides and sort."""
        out = []
        for d in diagnostics:
            if d.code in self.disabled:
                continue
            override = self.severity_overrides.get(d.code)
            out.append(replace(d, severity=override) if override else d)
        return sort_diagnostics(out)
