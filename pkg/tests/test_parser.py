from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pickles_mbt.parser import (
    PicklesError,
    PicklesSemanticError,
    PicklesSyntaxError,
    parse_spec,
    parse_testcase,
)
from pickles_mbt.printer import pretty_print
from pickles_mbt.syntax import (
    INPUT,
    OUTPUT,
    ArrayGuardAst,
    ArrayTypeAst,
    GivenAst,
    GuardBlockAst,
    IndexedValueAst,
    LiteralAst,
    PrimGuardAst,
    PrimTypeAst,
    RangeAst,
    ScalarValueAst,
    ScenarioAst,
    SpecSuiteAst,
    StepAst,
    StructGuardAst,
    StructTypeAst,
    StructValueAst,
    TestWhenAst,
    ThenAst,
    VarDeclAst,
    VarRefAst,
)

MINIMAL = """Variable Settings
"x" is a boolean with range {true, false}
"y" is a boolean with range {true, false}
Scenario: toggle
When x
Then y
"""


def test_case_study_shape(suite):
    assert [d.var_id for d in suite.variables] == [
        "availability", "enabledness", "faulty detectors",
        "critical section lane", "critical section start", "critical section end",
    ]
    fd = suite.declaration("faulty detectors").type_desc
    assert isinstance(fd, ArrayTypeAst) and fd.mode == "at most" and fd.bounds == (3,)
    assert isinstance(fd.element, StructTypeAst)
    assert fd.element.attributes == ("lane", "length position")
    assert len(suite.scenarios) == 4
    assert suite.scenarios[0].title == "01: faulty detectors outside the critical section"


def test_case_study_given_and_steps(suite):
    sc = suite.scenarios[0]
    assert sc.given.initial
    assert sc.given.referenced_vars == ("enabledness", "availability")
    assert sc.given.guard.connectives == ("AND",)
    (when,) = sc.when
    assert when.action == "the controller detects"
    assert when.params == ("faulty detectors",)
    assert when.direction == INPUT
    ((ref, guard),) = when.guard.clauses
    assert ref == VarRefAst("faulty detectors")
    assert isinstance(guard, ArrayGuardAst) and guard.quantifier == "all" and guard.count is None
    assert isinstance(guard.element, StructGuardAst)
    assert guard.element.connectives == ("OR", "OR")
    first = guard.element.clauses[0]
    assert first == ("lane", PrimGuardAst("!=", VarRefAst("critical section lane")))


def test_bare_multi_word_value(suite):
    (then,) = suite.scenarios[1].then
    assert then.direction == OUTPUT
    assert then.guard.clauses[0][1] == PrimGuardAst("=", LiteralAst("PART AV"))


def test_step_without_parameters(suite):
    (when,) = suite.scenarios[3].when
    assert when == StepAst("the controller access is lost", (), None, INPUT)


def test_minimal_suite_has_no_given():
    suite = parse_spec(MINIMAL)
    assert len(suite.scenarios) == 1
    assert suite.scenarios[0].given is None


def test_then_before_when_is_a_syntax_error():
    text = MINIMAL.replace("When x\nThen y", "Then y\nWhen x")
    with pytest.raises(PicklesSyntaxError) as err:
        parse_spec(text)
    assert err.value.line == 5
    assert "When" in err.value.expected


def test_suite_needs_a_scenario():
    with pytest.raises(PicklesSyntaxError):
        parse_spec('Variable Settings\n"x" is a boolean with range {true, false}\n')


def test_undeclared_variable_is_located():
    text = MINIMAL.replace("When x", 'When x "z" is equal to true')
    with pytest.raises(PicklesSemanticError) as err:
        parse_spec(text, "bad.pickles")
    assert "undeclared variable 'z'" in str(err.value)
    assert str(err.value).startswith("bad.pickles:4:")


def test_duplicate_declaration():
    text = MINIMAL.replace('"y" is', '"x" is')
    with pytest.raises(PicklesSemanticError, match="declared twice"):
        parse_spec(text)


def test_variable_colliding_with_attribute(case_study_text):
    text = case_study_text.replace('"critical section lane" is', '"lane" is', 1)
    with pytest.raises(PicklesSemanticError, match="structure attribute"):
        parse_spec(text)


def test_duplicate_scenario_title():
    text = MINIMAL + "Scenario: toggle\nWhen x\nThen y\n"
    with pytest.raises(PicklesSemanticError, match="duplicate scenario title"):
        parse_spec(text)


def test_error_as_dict():
    with pytest.raises(PicklesError) as err:
        parse_spec("Variables\n", "f.pickles")
    d = err.value.as_dict()
    assert d["file"] == "f.pickles" and d["line"] == 1 and d["column"] == 1


def test_one_line_sugar_equals_expanded_form(case_study_text):
    expanded = case_study_text.replace(
        'Then the user interface displays "availability" equal to AV',
        'Then the user interface displays "availability" such that:\n  "availability" is equal to AV',
    )
    assert expanded != case_study_text
    assert parse_spec(expanded) == parse_spec(case_study_text)


def test_indentation_is_not_significant(case_study_text):
    flat = "\n".join(line.strip() for line in case_study_text.splitlines())
    assert parse_spec(flat) == parse_spec(case_study_text)


def test_between_and_range_guards():
    text = """Variable Settings
"n" is an integer with range [0,9]
"m" is an integer with range [0,9]
Scenario: s
When the input arrives "n" such that:
  "n" is between 2 and "m" OR
  "n" is equal to {7, 8}
Then the output is "m" lower than 5
"""
    (when,) = parse_spec(text).scenarios[0].when
    (_, g1), (_, g2) = when.guard.clauses
    assert g1 == PrimGuardAst("between", LiteralAst("2"), VarRefAst("m"))
    assert g2 == PrimGuardAst("=", RangeAst("set", ("7", "8")))


def test_stored_reference():
    text = MINIMAL.replace("Then y", 'Then y "x" is equal to stored "x"')
    (then,) = parse_spec(text).scenarios[0].then
    assert then.guard.clauses[0][1].rhs == VarRefAst("x", stored=True)


def test_reference_test_shape(reference_test_text, suite):
    tc = parse_testcase(reference_test_text, suite=suite)
    assert [v.var_id for v in tc.given_values] == [
        "availability", "enabledness", "critical section lane",
        "critical section start", "critical section end", "faulty detectors",
    ]
    assert [type(b) for b in tc.blocks] == [TestWhenAst, ThenAst, TestWhenAst, ThenAst]
    fd = tc.given_values[-1].value
    assert isinstance(fd, IndexedValueAst) and [i for i, _ in fd.entries] == [1, 2, 3]
    assert fd.entries[0][1] == StructValueAst((("lane", ScalarValueAst("1")),
                                               ("length position", ScalarValueAst("1.5"))))


def test_testcase_without_steps():
    with pytest.raises(PicklesSyntaxError, match="at least one step"):
        parse_testcase('Given the system is initialized with values:\n  "x": true\n')


def test_testcase_unknown_variable(suite):
    text = 'Given the system is initialized with values:\n  "speed": 3\nWhen the controller access is lost\n'
    with pytest.raises(PicklesSemanticError):
        parse_testcase(text, suite=suite)


def test_inline_array_value():
    text = ('Given the system is initialized with values:\n'
            '  "a": [1: {"k": "x, y"}, 2: {"k": z}]\nWhen go\n')
    (vd,) = parse_testcase(text).given_values
    assert vd.value == IndexedValueAst((
        (1, StructValueAst((("k", ScalarValueAst("x, y", True)),))),
        (2, StructValueAst((("k", ScalarValueAst("z")),))),
    ))


def test_pretty_print_round_trip(suite, reference_test_text):
    text = pretty_print(suite)
    assert parse_spec(text) == suite
    assert pretty_print(parse_spec(text)) == text
    tc = parse_testcase(reference_test_text, suite=suite)
    assert parse_testcase(pretty_print(tc), suite=suite) == tc
    assert pretty_print(tc) == reference_test_text


def test_pretty_print_minimal_is_deterministic():
    suite = parse_spec(MINIMAL)
    assert pretty_print(suite) == pretty_print(parse_spec(MINIMAL))
    assert "Scenario toggle\nWhen x\nThen y\n" in pretty_print(suite)


# -- generated suites ----------------------------------------------------------

NAMES = ["speed", "gear", "door state", "alarm", "zone id", "mode"]
ATTRS = ["left", "right"]
WORDS = ["the", "panel", "sensor", "reads", "sends", "shows", "value"]

_PRIM_LITERALS = {
    "integer": ["0", "3", "7"],
    "boolean": ["true", "false"],
    "string": ["OPEN", "HALF OPEN", "SHUT"],
    "decimal": ["0.5", "1.25"],
}


@st.composite
def prim_types(draw):
    kind = draw(st.sampled_from(sorted(_PRIM_LITERALS)))
    if kind == "integer":
        return PrimTypeAst(kind, RangeAst("interval", ("0", "9")))
    if kind == "decimal":
        return PrimTypeAst(kind, RangeAst("interval", ("0.0", "2.0"), draw(st.booleans()), draw(st.booleans())))
    return PrimTypeAst(kind, RangeAst("set", tuple(_PRIM_LITERALS[kind])))


@st.composite
def type_descs(draw):
    shape = draw(st.sampled_from(["prim", "prim", "array", "struct"]))
    if shape == "prim":
        return draw(prim_types())
    struct = StructTypeAst(tuple(ATTRS), tuple((a, draw(prim_types())) for a in ATTRS))
    if shape == "struct":
        return struct
    element = draw(st.sampled_from([struct, draw(prim_types())]))
    mode = draw(st.sampled_from(["at most", "exactly", "between"]))
    bounds = (1, 3) if mode == "between" else (2,)
    return ArrayTypeAst(mode, bounds, element)


def _prim_guard(draw, prim: PrimTypeAst, others):
    op = draw(st.sampled_from(["=", "!=", "<", "<=", ">", ">="]))
    same = [v for v, t in others if t == prim.kind]
    if same and draw(st.booleans()):
        return PrimGuardAst(op, VarRefAst(draw(st.sampled_from(same)), draw(st.booleans())))
    return PrimGuardAst(op, LiteralAst(draw(st.sampled_from(_PRIM_LITERALS[prim.kind]))))


def _guard_for(draw, td, others):
    if isinstance(td, PrimTypeAst):
        return _prim_guard(draw, td, others)
    if isinstance(td, StructTypeAst):
        n = draw(st.integers(1, 2))
        clauses = tuple((a, _guard_for(draw, dict(td.descriptions)[a], others)) for a in ATTRS[:n])
        return StructGuardAst(clauses, tuple(draw(st.sampled_from(["AND", "OR"])) for _ in clauses[1:]))
    quant = draw(st.sampled_from(["all", "at least", "at most", "exactly"]))
    return ArrayGuardAst(quant, None if quant == "all" else draw(st.integers(0, 2)),
                         _guard_for(draw, td.element, others))


@st.composite
def suites(draw):
    names = draw(st.lists(st.sampled_from(NAMES), min_size=1, max_size=4, unique=True))
    decls = tuple(VarDeclAst(n, draw(type_descs())) for n in names)
    prims = [(d.var_id, d.type_desc.kind) for d in decls if isinstance(d.type_desc, PrimTypeAst)]
    types = {d.var_id: d.type_desc for d in decls}

    def block(params):
        clauses = tuple((VarRefAst(p), _guard_for(draw, types[p], prims)) for p in params)
        return GuardBlockAst(clauses, tuple(draw(st.sampled_from(["AND", "OR"])) for _ in clauses[1:]))

    def step(direction):
        action = " ".join(draw(st.lists(st.sampled_from(WORDS), min_size=1, max_size=4)))
        params = tuple(draw(st.lists(st.sampled_from(names), max_size=2, unique=True)))
        return StepAst(action, params, block(params) if params else None, direction)

    scenarios = []
    for i in range(draw(st.integers(1, 3))):
        given = None
        if draw(st.booleans()):
            ref = draw(st.sampled_from(names))
            given = GivenAst(draw(st.booleans()), f'the panel shows "{ref}"', (ref,), block((ref,)))
        when = tuple(step(INPUT) for _ in range(draw(st.integers(1, 2))))
        then = tuple(step(OUTPUT) for _ in range(draw(st.integers(1, 2))))
        scenarios.append(ScenarioAst(f"case {i}", given, when, then))
    return SpecSuiteAst(decls, tuple(scenarios))


@settings(max_examples=200, deadline=None)
@given(suites())
def test_generated_suites_round_trip(ast):
    text = pretty_print(ast)
    reparsed = parse_spec(text)
    assert reparsed == ast
    assert pretty_print(reparsed) == text


FRAGMENTS = [
    "Variable Settings\n", '"x" is a boolean with range {true, false}\n', '"n" is an integer with range [1,3]\n',
    "Scenario: s\n", "Given the system is in its initial state\n", "When go\n", "Then stop\n",
    'When go "x" such that:\n', '"x" is equal to true\n', "AND ", "OR ", "And ", '"n" has at least 2 elements where',
    "each element", "[1,", "{", '"', "between 1 and", "\n", "  ", "is a structure with attributes ",
]


@settings(max_examples=400, deadline=None)
@given(st.lists(st.sampled_from(FRAGMENTS), max_size=12), st.text(max_size=8))
def test_parser_never_crashes(fragments, noise):
    text = "".join(fragments) + noise
    for parse in (parse_spec, parse_testcase):
        try:
            parse(text)
        except PicklesError as err:
            assert err.line >= 1 or err.line == 0
