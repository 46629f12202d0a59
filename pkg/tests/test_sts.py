from __future__ import annotations

from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pickles_mbt.sts import (
    ELEM,
    FALSE,
    TRUE,
    AttrGet,
    BoolOp,
    Compare,
    Const,
    CountWhere,
    EvaluationError,
    InRange,
    LocVar,
    Param,
    Sts,
    Switch,
    TermTypeError,
    VarBinding,
    canonical,
    conj,
    evaluate,
    free_vars,
    normalize,
    sink_locations,
    substitute,
    term_type,
    validate,
)
from pickles_mbt.syntax import INPUT, OUTPUT
from pickles_mbt.values import T_BOOLEAN, T_INTEGER, EnumDomain, IntRange

from conftest import detector

X = VarBinding("x", T_INTEGER, IntRange(0, 9))
FLAG = VarBinding("flag", T_BOOLEAN, EnumDomain(T_BOOLEAN, (True, False)))


def chain(n: int, loops: bool = False) -> Sts:
    locs = tuple(f"l{i}" for i in range(n))
    switches = [
        Switch(f"r{i}", locs[i], "i1", ("x",), TRUE, (("x", Param("x")),), locs[i + 1], INPUT)
        for i in range(n - 1)
    ]
    if loops:
        switches += [Switch(f"loop{i}", loc, "i1", ("x",), TRUE, (), loc, INPUT) for i, loc in enumerate(locs)]
    return Sts(locs, "l0", (X, FLAG), ("i1",), ("o1",), {"i1": ("x",), "o1": ("flag",)}, tuple(switches))


def test_sink_of_chain():
    assert sink_locations(chain(3)) == ["l2"]


def test_self_loops_leave_no_sink():
    assert sink_locations(chain(3, loops=True)) == []


def test_case_study_scenario_sink(translated):
    s1 = translated.all[0]
    assert len(s1.locations) == 3 and len(s1.switches) == 2
    assert sink_locations(s1) == [s1.switches[-1].target]


def test_translated_models_validate(translated):
    for sts in translated.all:
        assert validate(sts) == []


def test_chain_validates():
    assert validate(chain(4)) == []


def test_interaction_inconsistency():
    sts = chain(3)
    bad = Switch("rx", "l0", "i1", (), TRUE, (), "l1", INPUT)
    problems = validate(sts.with_switches(sts.switches + (bad,)))
    assert any(p.startswith("interaction inconsistency") for p in problems)


def test_parameter_scope():
    sts = chain(2)
    bad = Switch("ry", "l1", "o1", ("flag",), Compare("=", Param("x"), Const(1)), (), "l0", OUTPUT)
    problems = validate(sts.with_switches(sts.switches + (bad,)))
    assert any(p.startswith("parameter scope") for p in problems)


def test_direction_mismatch_and_missing_location():
    sts = chain(2)
    bad = Switch("rz", "l1", "o1", ("flag",), TRUE, (), "nowhere", INPUT)
    problems = validate(sts.with_switches(sts.switches + (bad,)))
    assert any("direction" in p for p in problems)
    assert any("does not exist" in p for p in problems)


def test_ill_typed_guard():
    sts = chain(2)
    bad = Switch("rt", "l1", "o1", ("flag",), Compare("=", Param("flag"), Const(3)), (), "l0", OUTPUT)
    assert any(p.startswith("type") for p in validate(sts.with_switches(sts.switches + (bad,))))


def test_gate_in_both_directions():
    sts = chain(2)
    from dataclasses import replace
    assert any(p.startswith("gates") for p in validate(replace(sts, output_gates=("o1", "i1"))))


def test_example_output_guard():
    guard = Compare("=", Param("availability"), Const("PART AV"))
    assert evaluate(guard, {Param("availability"): "PART AV"}) is True
    assert evaluate(guard, {Param("availability"): "AV"}) is False


def test_count_at_least_two_greater_than_three():
    term = CountWhere(LocVar("a"), Compare(">", ELEM, Const(3)), ">=", 2)
    assert evaluate(term, {LocVar("a"): (4, 5, 1)}) is True
    assert evaluate(term, {LocVar("a"): (4, 1, 1)}) is False


def test_and_true_false():
    assert evaluate(BoolOp("and", (TRUE, FALSE)), {}) is False


def test_attr_get_on_struct():
    term = Compare("<", AttrGet(Param("d"), "length position"), Const(Decimal("2.0")))
    assert evaluate(term, {Param("d"): detector(1, "1.5")}) is True


def test_in_range():
    assert evaluate(InRange(Param("x"), IntRange(2, 4)), {Param("x"): 3}) is True
    assert evaluate(InRange(Param("x"), IntRange(2, 4)), {Param("x"): 5}) is False


def test_missing_variable():
    with pytest.raises(EvaluationError):
        evaluate(Compare("=", LocVar("x"), Const(1)), {})


def test_type_mismatch():
    with pytest.raises(EvaluationError):
        evaluate(Compare("<", LocVar("x"), Const("a")), {LocVar("x"): 1})


def test_term_type_rejects_unknown_attribute():
    with pytest.raises(TermTypeError):
        term_type(AttrGet(LocVar("x"), "k"), {"x": T_INTEGER})


def test_normalize_drops_neutral_constants():
    c = Compare("=", Param("x"), Const(1))
    assert normalize(conj(TRUE, c, TRUE)) == c
    assert normalize(BoolOp("and", (c, FALSE))) == FALSE


def test_free_vars_and_substitute():
    term = conj(Compare("=", LocVar("x"), Param("x")), Compare("=", LocVar("flag"), TRUE))
    assert free_vars(term) == {LocVar("x"), Param("x"), LocVar("flag")}
    replaced = substitute(term, {LocVar("x"): Const(4)})
    assert LocVar("x") not in free_vars(replaced)


def test_canonical_identifies_flipped_comparisons():
    a = Compare(">", Param("x"), LocVar("x"))
    b = Compare("<", LocVar("x"), Param("x"))
    assert canonical(a) == canonical(b)


def test_canonical_all_is_none_of_the_negation():
    pred = BoolOp("or", (Compare("!=", ELEM, Const(1)), Compare("<=", ELEM, Const(0))))
    every = CountWhere(LocVar("a"), pred, "=length")
    none = CountWhere(LocVar("a"), BoolOp("and", (Compare("=", ELEM, Const(1)), Compare(">", ELEM, Const(0)))), "=", 0)
    assert canonical(every) == canonical(none)


ints = st.lists(st.integers(0, 6), max_size=6).map(tuple)


@settings(max_examples=300)
@given(ints, st.integers(0, 6))
def test_count_length_is_universal_quantification(arr, k):
    pred = Compare(">", ELEM, Const(k))
    every = evaluate(CountWhere(LocVar("a"), pred, "=length"), {LocVar("a"): arr})
    assert every == all(e > k for e in arr)
    assert evaluate(CountWhere(LocVar("a"), pred, ">=", 0), {LocVar("a"): arr}) is True


@settings(max_examples=300)
@given(ints, st.integers(0, 6), st.integers(0, 4), st.sampled_from([">=", "<=", "="]))
def test_count_matches_python(arr, k, n, cmp):
    got = evaluate(CountWhere(LocVar("a"), Compare("<=", ELEM, Const(k)), cmp, n), {LocVar("a"): arr})
    count = sum(1 for e in arr if e <= k)
    expected = {">=": count >= n, "<=": count <= n, "=": count == n}[cmp]
    assert got is expected


@settings(max_examples=200)
@given(ints, st.integers(0, 6), st.integers(0, 6))
def test_canonical_preserves_meaning(arr, k, m):
    pred = BoolOp("or", (Compare("<", ELEM, Const(k)), Compare(">=", ELEM, Const(m))))
    term = conj(CountWhere(LocVar("a"), pred, "=length"), Compare(">", Const(k), Const(m)))
    env = {LocVar("a"): arr}
    assert evaluate(canonical(term), env) == evaluate(term, env)
