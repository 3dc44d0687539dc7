"""Lexer and recursive-descent parser for CTDL curriculum definitions.

Grammar (whitespace-insensitive outside strings, ``#`` comments to end of line)::

    file        = { statement } ;
    statement   = skill | concept | exercise | course ;
    skill       = "skill" IDENT STRING [ body ] ;
    concept     = "concept" IDENT STRING [ body ] ;
    body        = "{" { clause } "}" ;
    clause      = "requires" ":" idlist | "uses" ":" idlist | "tags" ":" idlist | "covered" ;
    exercise    = "exercise" IDENT STRING "{" "tests" ":" idlist "}" ;
    course      = "course" STRING "{" { courseclause } "}" ;
    courseclause= "prerequisite" ":" idlist | "goal" ":" idlist | "block-goal" ":" idlist ;
    idlist      = IDENT { "," IDENT } [ "," ] ;

The parser never stops at the first problem: after a syntax error it skips
to the next top-level keyword and carries on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union

from . import diagnostics as diag
from .diagnostics import Diagnostic, SourceLocation
from .graph import CourseSpec, EdgeDecl, EdgeKind, ExerciseDecl, NodeDecl, NodeKind

KEYWORDS = frozenset(
    {
        "skill", "concept", "exercise", "course", "requires", "uses", "tests",
        "goal", "block-goal", "prerequisite", "tags", "covered",
    }
)
TOP_LEVEL = frozenset({"skill", "concept", "exercise", "course"})

KW, IDENT, STRING, PUNCT, EOF = "kw", "ident", "str", "punct", "eof"


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    location: SourceLocation

    def __repr__(self) -> str:
        return f"{self.kind}:{self.value}"


class LexError(ValueError):
    def __init__(self, message: str, location: SourceLocation):
        super().__init__(f"{location}: {message}")
        self.message = message
        self.location = location


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<kwblock>block-goal(?![A-Za-z0-9_]))
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<badword>[0-9][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<punct>[{}:,])
  """,
    re.VERBOSE,
)
_ESCAPE_RE = re.compile(r"\\(.)")


def _scan(text: str, file: str) -> Iterator[Token | LexError]:
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        loc = SourceLocation(file, line, pos - line_start + 1)
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            ch = text[pos]
            if ch == '"':
                yield LexError("unterminated string", loc)
                end = text.find("\n", pos)
                pos = n if end < 0 else end
            else:
                yield LexError(f"illegal character {ch!r}", loc)
                pos += 1
            continue
        group = m.lastgroup
        pos = m.end()
        if group == "nl":
            line += 1
            line_start = pos
        elif group in ("ws", "comment"):
            pass
        elif group == "kwblock":
            yield Token(KW, "block-goal", loc)
        elif group == "badword":
            yield LexError(f"identifier {m.group()!r} must not start with a digit", loc)
        elif group == "word":
            word = m.group()
            yield Token(KW if word in KEYWORDS else IDENT, word, loc)
        elif group == "string":
            raw = m.group()[1:-1]
            bad = next((e for e in _ESCAPE_RE.finditer(raw) if e.group(1) not in '"\\'), None)
            if bad:
                col = loc.column + 1 + bad.start()
                yield LexError(f"invalid escape {bad.group()!r} in string", SourceLocation(file, line, col))
                continue
            yield Token(STRING, _ESCAPE_RE.sub(r"\1", raw), loc)
        else:
            yield Token(PUNCT, m.group(), loc)
    yield Token(EOF, "", SourceLocation(file, line, pos - line_start + 1))


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    """Tokens of ``text`` without the end marker; raises :class:`LexError`."""
    out = []
    for item in _scan(text, file):
        if isinstance(item, LexError):
            raise item
        if item.kind != EOF:
            out.append(item)
    return out


def quote(text: str) -> str:
    if "\n" in text:
        raise ValueError(f"CTDL strings cannot contain line breaks: {text!r}")
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


# -- declarations -------------------------------------------------------


@dataclass(frozen=True)
class NodeStatement:
    kind: NodeKind
    id: str
    title: str
    requires: tuple[str, ...] = ()
    uses: tuple[str, ...] = ()
    tags: tuple[str, ...] = ()
    covered: bool = False
    location: SourceLocation | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ExerciseStatement:
    id: str
    title: str
    tests: tuple[str, ...]
    location: SourceLocation | None = field(default=None, compare=False)


@dataclass(frozen=True)
class CourseStatement:
    name: str
    prerequisites: tuple[str, ...] = ()
    goals: tuple[str, ...] = ()
    block_goals: tuple[str, ...] = ()
    location: SourceLocation | None = field(default=None, compare=False)


Declaration = Union[NodeStatement, ExerciseStatement, CourseStatement]


@dataclass
class ParseResult:
    declarations: list[Declaration] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    edge_locations: dict[tuple[str, str, EdgeKind], SourceLocation] = field(default_factory=dict, repr=False)

    @property
    def ok(self) -> bool:
        return not diag.has_errors(self.diagnostics)

    @property
    def nodes(self) -> list[NodeStatement]:
        return [d for d in self.declarations if isinstance(d, NodeStatement)]

    @property
    def exercises(self) -> list[ExerciseStatement]:
        return [d for d in self.declarations if isinstance(d, ExerciseStatement)]

    @property
    def courses(self) -> list[CourseStatement]:
        return [d for d in self.declarations if isinstance(d, CourseStatement)]

    def node_decls(self) -> list[NodeDecl]:
        return [NodeDecl(s.id, s.kind, s.title, s.tags, s.covered, s.location) for s in self.nodes]

    def edge_decls(self) -> list[EdgeDecl]:
        """Edge facts in declaration order, duplicates removed."""
        out: dict[tuple[str, str, EdgeKind], EdgeDecl] = {}
        for s in self.nodes:
            sub = EdgeKind.SUBSKILL if s.kind is NodeKind.SKILL else EdgeKind.SUBCONCEPT
            for refs, kind in ((s.requires, sub), (s.uses, EdgeKind.CONCEPT_REQUIREMENT)):
                for ref in refs:
                    key = (s.id, ref, kind)
                    if key not in out:
                        out[key] = EdgeDecl(s.id, ref, kind, self.edge_locations.get(key, s.location))
        return list(out.values())

    def exercise_decls(self) -> list[ExerciseDecl]:
        return [ExerciseDecl(x.id, x.title, x.tests, x.location) for x in self.exercises]

    def course_specs(self) -> list[CourseSpec]:
        return [
            CourseSpec(c.name, c.goals, frozenset(c.prerequisites), c.block_goals, c.location)
            for c in self.courses
        ]


class _SyntaxError(Exception):
    def __init__(self, message: str, location: SourceLocation):
        self.message = message
        self.location = location


class _Parser:
    def __init__(self, text: str, file: str):
        self.result = ParseResult()
        self.tokens: list[Token] = []
        for item in _scan(text, file):
            if isinstance(item, LexError):
                self.result.diagnostics.append(diag.make("E002", item.message, location=item.location))
            else:
                self.tokens.append(item)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != EOF:
            self.pos += 1
        return t

    def at(self, kind: str, value: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (value is None or t.value == value)

    def expect(self, kind: str, value: str | None = None, what: str | None = None) -> Token:
        if self.at(kind, value):
            return self.advance()
        t = self.tok
        location = t.location if t.kind != EOF or self.pos == 0 else self.tokens[self.pos - 1].location
        wanted = what or (repr(value) if value else {IDENT: "identifier", STRING: "string"}.get(kind, kind))
        found = "end of input" if t.kind == EOF else repr(t.value) if t.kind != STRING else "string"
        raise _SyntaxError(f"expected {wanted}, found {found}", location)

    def warn(self, code: str, message: str, nodes: tuple[str, ...], location: SourceLocation) -> None:
        self.result.diagnostics.append(diag.make(code, message, nodes, location))

    # -- grammar ----------------------------------------------------------

    def parse(self) -> ParseResult:
        while not self.at(EOF):
            start = self.tok
            try:
                if start.kind == KW and start.value in ("skill", "concept"):
                    self.node_statement()
                elif self.at(KW, "exercise"):
                    self.exercise_statement()
                elif self.at(KW, "course"):
                    self.course_statement()
                else:
                    raise _SyntaxError(
                        f"expected 'skill', 'concept', 'exercise' or 'course', found {start.value!r}",
                        start.location,
                    )
            except _SyntaxError as err:
                self.result.diagnostics.append(diag.make("E001", err.message, location=err.location))
                self.recover(start)
        return self.result

    def recover(self, start: Token) -> None:
        if self.tok is start:
            self.advance()
        while not self.at(EOF) and not (self.tok.kind == KW and self.tok.value in TOP_LEVEL):
            self.advance()

    def idlist(self) -> list[Token]:
        items = [self.expect(IDENT)]
        while self.at(PUNCT, ","):
            self.advance()
            if not self.at(IDENT):
                break
            items.append(self.advance())
        return items

    def clause_list(self) -> list[Token]:
        self.expect(PUNCT, ":")
        return self.idlist()

    def node_statement(self) -> None:
        head = self.advance()
        kind = NodeKind(head.value)
        node_id = self.expect(IDENT).value
        title = self.expect(STRING).value
        requires: list[str] = []
        uses: list[str] = []
        tags: list[str] = []
        covered = False
        edge_kind = EdgeKind.SUBSKILL if kind is NodeKind.SKILL else EdgeKind.SUBCONCEPT
        if self.at(PUNCT, "{"):
            self.advance()
            while not self.at(PUNCT, "}"):
                clause = self.expect(KW, what="'requires', 'uses', 'tags', 'covered' or '}'")
                if clause.value == "covered":
                    covered = True
                elif clause.value in ("requires", "uses"):
                    if clause.value == "uses" and kind is NodeKind.CONCEPT:
                        raise _SyntaxError("'uses' is only allowed in skill bodies", clause.location)
                    target, ekind = (requires, edge_kind) if clause.value == "requires" else (uses, EdgeKind.CONCEPT_REQUIREMENT)
                    for ref in self.clause_list():
                        if ref.value in target:
                            self.warn("W001", f"{node_id} lists {ref.value!r} under {clause.value!r} twice",
                                      (node_id, ref.value), ref.location)
                            continue
                        target.append(ref.value)
                        self.result.edge_locations[(node_id, ref.value, ekind)] = ref.location
                elif clause.value == "tags":
                    tags.extend(t.value for t in self.clause_list() if t.value not in tags)
                else:
                    raise _SyntaxError(f"{clause.value!r} is not allowed in a {kind.value} body", clause.location)
            self.advance()
        self.result.declarations.append(
            NodeStatement(kind, node_id, title, tuple(requires), tuple(uses), tuple(tags), covered, head.location)
        )

    def exercise_statement(self) -> None:
        head = self.advance()
        ex_id = self.expect(IDENT).value
        title = self.expect(STRING).value
        self.expect(PUNCT, "{")
        self.expect(KW, "tests")
        tests = []
        for ref in self.clause_list():
            if ref.value not in tests:
                tests.append(ref.value)
        self.expect(PUNCT, "}")
        self.result.declarations.append(ExerciseStatement(ex_id, title, tuple(tests), head.location))

    def course_statement(self) -> None:
        head = self.advance()
        name = self.expect(STRING).value
        self.expect(PUNCT, "{")
        lists: dict[str, list[str]] = {"prerequisite": [], "goal": [], "block-goal": []}
        while not self.at(PUNCT, "}"):
            clause = self.expect(KW, what="'prerequisite', 'goal', 'block-goal' or '}'")
            if clause.value not in lists:
                raise _SyntaxError(f"{clause.value!r} is not allowed in a course body", clause.location)
            target = lists[clause.value]
            target.extend(t.value for t in self.clause_list() if t.value not in target)
        self.advance()
        if not lists["goal"]:
            raise _SyntaxError(f"course {name!r} declares no goal", head.location)
        overlap = set(lists["goal"]) & set(lists["prerequisite"])
        if overlap:
            raise _SyntaxError(
                f"course {name!r} lists {', '.join(sorted(overlap))} as both goal and prerequisite", head.location
            )
        self.result.declarations.append(
            CourseStatement(name, tuple(lists["prerequisite"]), tuple(lists["goal"]), tuple(lists["block-goal"]), head.location)
        )


def parse(text: str, file_name: str = "<input>") -> ParseResult:
    """Parse CTDL source into declarations plus E001/E002/W001 diagnostics."""
    return _Parser(text, file_name).parse()
