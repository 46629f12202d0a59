from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pickles_mbt.values import (
    T_DECIMAL,
    T_INTEGER,
    T_STRING,
    ArrayDomain,
    ArrayType,
    DecimalRange,
    DomainError,
    EnumDomain,
    IntRange,
    SamplingError,
    SamplingPlan,
    Struct,
    StructDomain,
    StructType,
    canonical_decimal,
    domain_contains,
    domain_size,
    enumerate_domain,
    format_value,
    type_of,
    value_has_type,
)

from oracles import distinct_arrays

LP = DecimalRange(Decimal("1.0"), Decimal("3.0"))
DETECTOR = StructDomain((("lane", IntRange(1, 3)), ("length position", LP)))


def test_type_of_primitives():
    assert type_of(True).kind == "boolean"
    assert type_of(3) == T_INTEGER
    assert type_of(Decimal("1.5")) == T_DECIMAL
    assert type_of("AV") == T_STRING


def test_type_of_struct_and_array():
    d = Struct({"lane": 1, "length position": Decimal("1.5")})
    t = type_of((d, d))
    assert t == ArrayType(StructType((("lane", T_INTEGER), ("length position", T_DECIMAL))))


def test_type_of_empty_array_is_an_error():
    with pytest.raises(DomainError):
        type_of(())


def test_bool_is_not_an_integer():
    assert not value_has_type(True, T_INTEGER)


def test_struct_equality_ignores_key_order_and_hashes():
    a = Struct({"x": 1, "y": 2})
    b = Struct((("y", 2), ("x", 1)))
    assert a == b and hash(a) == hash(b)
    assert list(a) == ["x", "y"]


def test_canonical_decimal():
    assert str(canonical_decimal(Decimal("2.000"))) == "2.0"
    assert str(canonical_decimal(Decimal("2"))) == "2.0"
    assert str(canonical_decimal(Decimal("1.500"))) == "1.5"


def test_format_value():
    assert format_value(True) == "true"
    assert format_value(Decimal("2.0")) == "2.0"


def test_empty_ranges_are_rejected():
    with pytest.raises(DomainError):
        IntRange(3, 1)
    with pytest.raises(DomainError):
        DecimalRange(Decimal(1), Decimal(1))
    with pytest.raises(DomainError):
        EnumDomain(T_STRING, ())


def test_array_cardinality_must_be_positive():
    with pytest.raises(DomainError):
        ArrayDomain(IntRange(1, 2), 0, 2)


def test_enum_rejects_mistyped_values():
    with pytest.raises(DomainError):
        EnumDomain(T_INTEGER, ("a", "b"))


def test_open_decimal_bounds():
    assert Decimal("1.0") not in LP
    assert Decimal("1.001") in LP
    closed = DecimalRange(Decimal("1.0"), Decimal("3.0"), False, False)
    assert Decimal("1.0") in closed


def test_domain_contains_allows_repeated_array_elements():
    dom = ArrayDomain(DETECTOR, 1, 3)
    d = Struct({"lane": 1, "length position": Decimal("1.5")})
    assert domain_contains(dom, (d, d, d))
    assert not domain_contains(dom, (d,) * 4)


def test_default_samples_include_nudged_bounds_and_quartiles():
    plan = SamplingPlan()
    assert [str(x) for x in plan.samples_for("x", LP)] == ["1.001", "1.5", "2.0", "2.5", "2.999"]


def test_explicit_samples_win_and_are_checked():
    plan = SamplingPlan({"x": ("1.6",)})
    assert plan.samples_for("x", LP) == (Decimal("1.6"),)
    with pytest.raises(SamplingError):
        SamplingPlan({"x": ("3.5",)}).samples_for("x", LP)


def test_no_auto_sampling_raises():
    with pytest.raises(SamplingError):
        SamplingPlan(auto=False).samples_for("x", LP)


def test_decimal_enumeration_needs_a_plan():
    with pytest.raises(SamplingError):
        enumerate_domain(LP)


def test_case_study_detector_arrays():
    plan = SamplingPlan({".length position": ("1.001", "1.6", "1.9", "2.999")})
    arrays = enumerate_domain(ArrayDomain(DETECTOR, 1, 3), plan)
    assert len(arrays) == 12 + 66 + 220 == 298


def test_default_plan_array_count():
    arrays = enumerate_domain(ArrayDomain(DETECTOR, 1, 3), SamplingPlan())
    assert len(arrays) == 15 + 105 + 455 == 575


@st.composite
def small_domains(draw, depth=0):
    kinds = ["int", "enum", "dec"] + (["array", "struct"] if depth < 2 else [])
    kind = draw(st.sampled_from(kinds))
    if kind == "int":
        lo = draw(st.integers(-3, 3))
        return IntRange(lo, lo + draw(st.integers(0, 3)))
    if kind == "enum":
        vals = draw(st.lists(st.sampled_from(["a", "b", "c", "d"]), min_size=1, max_size=3, unique=True))
        return EnumDomain(T_STRING, tuple(vals))
    if kind == "dec":
        lo = Decimal(draw(st.integers(0, 5)))
        return DecimalRange(lo, lo + Decimal(draw(st.integers(1, 4))), draw(st.booleans()), draw(st.booleans()))
    if kind == "array":
        lo = draw(st.integers(1, 2))
        return ArrayDomain(draw(small_domains(depth=depth + 1)), lo, lo + draw(st.integers(0, 1)))
    n = draw(st.integers(1, 2))
    return StructDomain(tuple((f"k{i}", draw(small_domains(depth=depth + 1))) for i in range(n)))


@settings(max_examples=150, deadline=None)
@given(small_domains())
def test_enumeration_members_lie_in_the_domain(dom):
    values = enumerate_domain(dom, SamplingPlan())
    assert len(values) == domain_size(dom, SamplingPlan())
    assert len(set(values)) == len(values)
    for v in values[:200]:
        assert domain_contains(dom, v)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 3))
def test_array_enumeration_matches_brute_force(n_elements, max_len):
    element = IntRange(1, n_elements)
    ours = enumerate_domain(ArrayDomain(element, 1, max_len))
    oracle = distinct_arrays(range(1, n_elements + 1), 1, max_len)
    assert sorted(map(frozenset, ours), key=sorted) == sorted(map(frozenset, oracle), key=sorted)
    assert all(len(set(a)) == len(a) for a in ours)
