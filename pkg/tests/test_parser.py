import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skilltree import LexError, NodeKind, parse, tokenize
from skilltree.diagnostics import SourceLocation
from skilltree.parser import CourseStatement, ExerciseStatement

from conftest import DEMOS


def kinds_and_values(tokens):
    return [(t.kind, t.value) for t in tokens]


def test_tokenize_minimal_declaration():
    assert kinds_and_values(tokenize('skill a "A"')) == [("kw", "skill"), ("ident", "a"), ("str", "A")]


def test_comment_is_dropped():
    tokens = tokenize('# comment\nconcept e "Eq"')
    assert len(tokens) == 3
    assert {t.location.line for t in tokens} == {2}


def test_unterminated_string_location():
    with pytest.raises(LexError) as info:
        tokenize('skill a "unterminated')
    assert (info.value.location.line, info.value.location.column) == (1, 9)


def test_illegal_character():
    with pytest.raises(LexError) as info:
        tokenize("skill a\n  @")
    assert (info.value.location.line, info.value.location.column) == (2, 3)


def test_string_escapes():
    [tok] = tokenize(r'"say \"hi\" \\ bye"')
    assert tok.value == 'say "hi" \\ bye'
    with pytest.raises(LexError):
        tokenize(r'"bad \n escape"')


def test_block_goal_keyword_and_block_identifier():
    assert kinds_and_values(tokenize("block-goal block")) == [("kw", "block-goal"), ("ident", "block")]


def test_parse_algebra_source():
    result = parse((DEMOS / "linear_equation.ctdl").read_text(), "linear_equation.ctdl")
    assert result.diagnostics == []
    assert len(result.nodes) == 8
    assert len(result.edge_decls()) == 7
    assert len(result.exercises) == 6
    assert [c.name for c in result.courses] == ["algebra"]


def test_empty_file():
    result = parse("", "empty.ctdl")
    assert result.declarations == [] and result.diagnostics == []


def test_trailing_comma_accepted():
    result = parse('skill a "A" { requires: b, }\nskill b "B"')
    assert result.diagnostics == []
    assert result.nodes[0].requires == ("b",)


def test_repeated_requires_clauses_merge_in_order():
    result = parse('skill a "A" { requires: c requires: b, c }')
    assert result.nodes[0].requires == ("c", "b")
    assert [d.code for d in result.diagnostics] == ["W001"]


def test_duplicate_edge_fact_is_a_warning_and_deduplicated():
    result = parse('skill a "A" { requires: b, b }\nskill b "B"')
    assert [d.code for d in result.diagnostics] == ["W001"]
    assert len(result.edge_decls()) == 1
    assert result.ok


def test_uses_only_in_skill_bodies():
    result = parse('concept c "C" { uses: d }\nconcept d "D"')
    assert [d.code for d in result.diagnostics] == ["E001"]
    assert [n.id for n in result.nodes] == ["d"]


def test_covered_and_tags():
    result = parse('skill a "A" { covered tags: x, y, x }')
    node = result.nodes[0]
    assert node.covered and node.tags == ("x", "y")


def test_course_clauses():
    result = parse('course "c" { prerequisite: p goal: a, b block-goal: a, b }')
    assert result.courses == [CourseStatement("c", ("p",), ("a", "b"), ("a", "b"))]


def test_course_without_goal_is_an_error():
    result = parse('course "c" { prerequisite: p }')
    assert [d.code for d in result.diagnostics] == ["E001"]


def test_exercise_statement():
    result = parse('exercise ex "Do it" { tests: a, b, }')
    assert result.exercises == [ExerciseStatement("ex", "Do it", ("a", "b"))]


def test_error_recovery_keeps_valid_statements():
    src = "\n".join([
        'skill a "A"',
        'skill "missing id"',
        'skill b "B" { requires: a }',
        'concept c { }',
        'exercise x "X" { tests: b }',
        'course "k" { goal: }',
        'skill d "D"',
    ])
    result = parse(src, "f.ctdl")
    errors = [d for d in result.diagnostics if d.code == "E001"]
    assert len(errors) >= 3
    assert [n.id for n in result.nodes] == ["a", "b", "d"]
    assert [x.id for x in result.exercises] == ["x"]
    assert {e.location.line for e in errors} == {2, 4, 6}


def test_error_at_end_of_input_points_into_statement():
    result = parse('skill a "A" {\n  requires: b,\n\n\n', "f.ctdl")
    [err] = result.diagnostics
    assert err.location.line == 2


def test_lex_errors_do_not_stop_parsing():
    result = parse('skill a "A" $\nskill b "B"')
    assert [d.code for d in result.diagnostics] == ["E002"]
    assert [n.id for n in result.nodes] == ["a", "b"]


def test_keyword_cannot_be_an_identifier():
    result = parse('skill goal "G"')
    assert [d.code for d in result.diagnostics] == ["E001"]


def test_declaration_order_and_locations():
    result = parse('skill b "B"\n\n  concept a "A"', "x.ctdl")
    assert [n.id for n in result.nodes] == ["b", "a"]
    assert result.nodes[1].location == SourceLocation("x.ctdl", 3, 3)
    assert result.nodes[1].kind is NodeKind.CONCEPT


good_statement = st.sampled_from([
    'skill s{i} "S{i}"',
    'concept c{i} "C{i}" {{ tags: t }}',
    'skill k{i} "K{i}" {{ covered }}',
])
bad_statement = st.sampled_from([
    'skill "no id {i}"',
    'concept 9x "C"',
    'skill z{i} "Z" {{ requires }}',
    'exercise e{i} "E" {{ }}',
    'course "c{i}" {{ goal: a b: }}',
    'skill q{i} "Q" {{ uses: , }}',
])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.booleans(), good_statement, bad_statement), min_size=1, max_size=8))
def test_recovery_property(plan):
    lines, n_bad, n_good = [], 0, 0
    for i, (bad, good_tpl, bad_tpl) in enumerate(plan):
        if bad:
            lines.append(bad_tpl.format(i=i))
            n_bad += 1
        lines.append(good_tpl.format(i=i))
        n_good += 1
    result = parse("\n".join(lines), "p.ctdl")
    errors = [d for d in result.diagnostics if d.severity.value == "error"]
    assert len(errors) >= n_bad
    assert len(result.nodes) == n_good
    for d in errors:
        # each statement sits on its own line
        assert lines[d.location.line - 1].split()[0] in {"skill", "concept", "exercise", "course"}
