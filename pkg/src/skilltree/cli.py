"""Command-line front end.

Exit codes: 0 clean, 1 error-severity diagnostics, 2 usage, I/O or fatal input errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Sequence, TextIO

from . import diagnostics as diag
from .diagnostics import CATALOG, Diagnostic, LintConfig, Severity
from .document import Document, load_file
from .exporters import ExportOptions, to_ctdl, to_dot, to_json, to_markdown_plan
from .graph import UnresolvedReference
from .grouper import GroupingError, auto_select_goals, balance_diagnostics, group_blocks
from .linter import check_sequence, lint_graph
from .planner import EmptyContents, PlannerOptions, TieBreak, plan_order

EXIT_OK, EXIT_ERRORS, EXIT_USAGE = 0, 1, 2


class CliError(Exception):
    def __init__(self, message: str, exit_code: int = EXIT_USAGE, diagnostics: Sequence[Diagnostic] = ()):
        super().__init__(message)
        self.exit_code = exit_code
        self.diagnostics = list(diagnostics)


def _use_color(stream: TextIO) -> bool:
    return "NO_COLOR" not in os.environ and hasattr(stream, "isatty") and stream.isatty()


def _print_diagnostics(diagnostics: Sequence[Diagnostic], stream: TextIO) -> None:
    color = _use_color(stream)
    for d in diagnostics:
        print(d.render(color), file=stream)


def _severity_override(text: str) -> tuple[str, str]:
    code, sep, level = text.partition("=")
    code = code.strip().upper()
    level = level.strip().lower()
    if not sep or code not in CATALOG or level not in ("error", "warning", "off"):
        raise argparse.ArgumentTypeError(f"expected CODE=error|warning|off with a known code, got {text!r}")
    return code, level


def _id_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", type=Path, help="CTDL source file")
    common.add_argument("--course", help="course name (optional when the file declares exactly one course)")
    common.add_argument("--severity", action="append", type=_severity_override, default=[], metavar="CODE=LEVEL",
                        help="override a diagnostic: error, warning or off (repeatable)")
    common.add_argument("--max-subskills", type=int, default=5, help="W201 threshold (default 5)")
    common.add_argument("--block-min", type=int, default=3, help="smallest acceptable block (default 3)")
    common.add_argument("--block-max", type=int, default=6, help="largest acceptable block (default 6)")
    common.add_argument("--skills-only", action="store_true",
                        help="count only skills in subtree and block sizes")
    common.add_argument("--tie-break", choices=[t.value for t in TieBreak], default=TieBreak.DECLARATION_ORDER.value,
                        help="order of equally sized prerequisites (default: declaration)")

    parser = argparse.ArgumentParser(prog="skilltree", description="Lint and plan Concept/Skill Tree curricula.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub.add_parser("validate", parents=[common], help="parse, build and lint; print diagnostics")

    p = sub.add_parser("plan", parents=[common], help="print a teaching order")
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("blocks", parents=[common], help="group the teaching order into blocks")
    p.add_argument("--goals", type=_id_list, help="comma-separated block goals, used when the course declares none")
    p.add_argument("--format", choices=["md", "json"], default="md")

    p = sub.add_parser("export", parents=[common], help="write the graph as DOT, JSON or CTDL")
    p.add_argument("--format", choices=["dot", "json", "ctdl"], required=True)
    p.add_argument("-o", "--output", type=Path, help="output file (default: standard output)")
    p.add_argument("--contents-only", action="store_true", help="DOT: draw only the selected course's contents")

    p = sub.add_parser("check-order", parents=[common], help="check a hand-written teaching order")
    p.add_argument("--order", type=Path, required=True, help="file with one node id per line; # starts a comment")
    return parser


def _config(args: argparse.Namespace) -> LintConfig:
    overrides = {}
    disabled = set(LintConfig().disabled)
    for code, level in args.severity:
        if level == "off":
            disabled.add(code)
        else:
            disabled.discard(code)
            overrides[code] = Severity(level)
    try:
        return LintConfig(
            severity_overrides=overrides,
            disabled=frozenset(disabled),
            max_subskills=args.max_subskills,
            block_min=args.block_min,
            block_max=args.block_max,
            count_concepts_in_block_size=not args.skills_only,
        )
    except ValueError as err:
        raise CliError(str(err)) from None


def _load(args: argparse.Namespace, config: LintConfig, strict: bool = True) -> Document:
    try:
        doc = load_file(args.file)
    except OSError as err:
        raise CliError(f"cannot read {args.file}: {err.strerror or err}") from None
    except UnicodeDecodeError:
        raise CliError(f"{args.file} is not valid UTF-8") from None
    if strict and not doc.ok:
        raise CliError(f"{args.file} has errors; fix them before planning",
                       diagnostics=config.apply(doc.diagnostics))
    return doc


def _course(doc: Document, name: str | None):
    try:
        return doc.course(name)
    except LookupError as err:
        raise CliError(str(err)) from None


def _emit(text: str, output: Path | None = None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        try:
            output.write_text(text, encoding="utf-8")
        except OSError as err:
            raise CliError(f"cannot write {output}: {err.strerror or err}") from None


def _planner_options(args: argparse.Namespace) -> PlannerOptions:
    return PlannerOptions(not args.skills_only, TieBreak(args.tie_break))


def cmd_validate(args: argparse.Namespace, config: LintConfig) -> int:
    doc = _load(args, config, strict=False)
    found = list(doc.diagnostics)
    if doc.graph is not None:
        course = None
        if args.course is not None or len(doc.courses) == 1:
            course = _course(doc, args.course)
        found += lint_graph(doc.graph, course, config)
    found = config.apply(found)
    _print_diagnostics(found, sys.stdout)
    return EXIT_ERRORS if diag.has_errors(found) else EXIT_OK


def _plan(args: argparse.Namespace, config: LintConfig):
    doc = _load(args, config)
    course = _course(doc, args.course)
    try:
        sequence = plan_order(doc.graph, course, _planner_options(args))
    except EmptyContents as err:
        raise CliError(str(err)) from None
    return doc, course, sequence


def cmd_plan(args: argparse.Namespace, config: LintConfig) -> int:
    _, _, sequence = _plan(args, config)
    if args.format == "json":
        _emit(to_json(sequence))
    else:
        _emit("".join(f"{item}\n" for item in sequence))
    return EXIT_OK


def cmd_blocks(args: argparse.Namespace, config: LintConfig) -> int:
    doc, course, sequence = _plan(args, config)
    try:
        goals = list(course.declared_block_goals) or args.goals or auto_select_goals(doc.graph, sequence, config)
        plan = group_blocks(doc.graph, sequence, goals, config)
    except (GroupingError, UnresolvedReference) as err:
        raise CliError(str(err)) from None
    _print_diagnostics(balance_diagnostics(plan, doc.graph, config), sys.stderr)
    if args.format == "json":
        _emit(to_json(plan))
    else:
        _emit(to_markdown_plan(plan, sequence, doc.graph))
    return EXIT_OK


def cmd_export(args: argparse.Namespace, config: LintConfig) -> int:
    doc = _load(args, config)
    if args.format == "dot":
        course = _course(doc, args.course) if args.course is not None or args.contents_only else None
        text = to_dot(doc.graph, course, ExportOptions(include_prerequisite_nodes=not args.contents_only))
    elif args.format == "json":
        text = to_json(doc.graph)
    else:
        text = to_ctdl(doc.graph, doc.courses)
    _emit(text, args.output)
    return EXIT_OK


def read_order_file(path: Path) -> list[str]:
    items = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            items.append(line)
    return items


def cmd_check_order(args: argparse.Namespace, config: LintConfig) -> int:
    doc = _load(args, config)
    course = _course(doc, args.course)
    try:
        order = read_order_file(args.order)
    except OSError as err:
        raise CliError(f"cannot read {args.order}: {err.strerror or err}") from None
    try:
        found = check_sequence(doc.graph, course, order, config)
    except UnresolvedReference as err:
        found = config.apply([diag.make("E010", f"{err} in order file {args.order}", err.nodes)])
    _print_diagnostics(found, sys.stdout)
    return EXIT_ERRORS if diag.has_errors(found) else EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "plan": cmd_plan,
    "blocks": cmd_blocks,
    "export": cmd_export,
    "check-order": cmd_check_order,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        config = _config(args)
        return COMMANDS[args.command](args, config)
    except CliError as err:
        _print_diagnostics(err.diagnostics, sys.stderr)
        print(f"skilltree: {err}", file=sys.stderr)
        return err.exit_code


def run() -> None:
    sys.exit(main())
