"""Symbolic transition systems and the term language of their guards."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Union

from .syntax import INPUT, OUTPUT
from .values import (
    ArrayType,
    DecimalRange,
    Domain,
    EnumDomain,
    IntRange,
    PrimType,
    StructType,
    T_BOOLEAN,
    T_DECIMAL,
    T_INTEGER,
    Type,
    Value,
    domain_contains,
    type_of,
)


class EvaluationError(ValueError):
    """A term could not be evaluated (unbound variable or ill-typed operands)."""


class TermTypeError(TypeError):
    pass


# -- terms --------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: Value


@dataclass(frozen=True)
class LocVar:
    name: str

    def __str__(self):
        return f"v[{self.name}]"


@dataclass(frozen=True)
class Param:
    name: str

    def __str__(self):
        return f"p[{self.name}]"


@dataclass(frozen=True)
class Elem:
    """The array element bound by the innermost enclosing :class:`CountWhere`."""


@dataclass(frozen=True)
class AttrGet:
    operand: "Term"
    key: str


@dataclass(frozen=True)
class Compare:
    op: str  # = != < <= > >=
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class InRange:
    operand: "Term"
    domain: Union[IntRange, DecimalRange, EnumDomain]


@dataclass(frozen=True)
class BoolOp:
    op: str  # "and" | "or"
    args: tuple["Term", ...]


@dataclass(frozen=True)
class CountWhere:
    """``|{e in array | predicate(e)}|  cmp  count``; ``=length`` means every element."""

    array: "Term"
    predicate: "Term"
    cmp: str  # ">=" | "<=" | "=" | "=length"
    count: int = 0


Term = Union[Const, LocVar, Param, Elem, AttrGet, Compare, InRange, BoolOp, CountWhere]
Variable = Union[LocVar, Param]

TRUE = Const(True)
FALSE = Const(False)
ELEM = Elem()

COMPARE_OPS = ("=", "!=", "<", "<=", ">", ">=")
COUNT_CMPS = (">=", "<=", "=", "=length")


def conj(*terms: Term) -> Term:
    """Left-associated binary conjunction."""
    out = terms[0]
    for t in terms[1:]:
        out = BoolOp("and", (out, t))
    return out


def disj(*terms: Term) -> Term:
    out = terms[0]
    for t in terms[1:]:
        out = BoolOp("or", (out, t))
    return out


def normalize(term: Term) -> Term:
    """Flatten nested and/or, fold constants, keep argument order."""
    if isinstance(term, BoolOp):
        flat = []
        for a in (normalize(a) for a in term.args):
            if isinstance(a, BoolOp) and a.op == term.op:
                flat.extend(a.args)
            else:
                flat.append(a)
        neutral, absorbing = (TRUE, FALSE) if term.op == "and" else (FALSE, TRUE)
        if absorbing in flat:
            return absorbing
        flat = [a for a in flat if a != neutral]
        if not flat:
            return neutral
        if len(flat) == 1:
            return flat[0]
        return BoolOp(term.op, tuple(flat))
    if isinstance(term, AttrGet):
        return AttrGet(normalize(term.operand), term.key)
    if isinstance(term, Compare):
        return Compare(term.op, normalize(term.left), normalize(term.right))
    if isinstance(term, InRange):
        return InRange(normalize(term.operand), term.domain)
    if isinstance(term, CountWhere):
        return CountWhere(normalize(term.array), normalize(term.predicate), term.cmp, term.count)
    return term


def conjuncts(term: Term) -> list[Term]:
    if isinstance(term, BoolOp) and term.op == "and":
        out = []
        for a in term.args:
            out.extend(conjuncts(a))
        return out
    if term == TRUE:
        return []
    return [term]


def free_vars(term: Term) -> set:
    out: set = set()
    _collect(term, out)
    return out


def _collect(term, out):
    if isinstance(term, (LocVar, Param)):
        out.add(term)
    elif isinstance(term, AttrGet):
        _collect(term.operand, out)
    elif isinstance(term, Compare):
        _collect(term.left, out)
        _collect(term.right, out)
    elif isinstance(term, InRange):
        _collect(term.operand, out)
    elif isinstance(term, BoolOp):
        for a in term.args:
            _collect(a, out)
    elif isinstance(term, CountWhere):
        _collect(term.array, out)
        _collect(term.predicate, out)


def substitute(term: Term, mapping: Mapping) -> Term:
    """Replace variables by terms, simultaneously."""
    if isinstance(term, (LocVar, Param)):
        return mapping.get(term, term)
    if isinstance(term, AttrGet):
        return AttrGet(substitute(term.operand, mapping), term.key)
    if isinstance(term, Compare):
        return Compare(term.op, substitute(term.left, mapping), substitute(term.right, mapping))
    if isinstance(term, InRange):
        return InRange(substitute(term.operand, mapping), term.domain)
    if isinstance(term, BoolOp):
        return BoolOp(term.op, tuple(substitute(a, mapping) for a in term.args))
    if isinstance(term, CountWhere):
        return CountWhere(substitute(term.array, mapping), substitute(term.predicate, mapping),
                          term.cmp, term.count)
    return term


def contains_elem_outside_count(term: Term, inside: bool = False) -> bool:
    if isinstance(term, Elem):
        return not inside
    if isinstance(term, CountWhere):
        return contains_elem_outside_count(term.array, inside) or contains_elem_outside_count(term.predicate, True)
    if isinstance(term, AttrGet):
        return contains_elem_outside_count(term.operand, inside)
    if isinstance(term, InRange):
        return contains_elem_outside_count(term.operand, inside)
    if isinstance(term, Compare):
        return contains_elem_outside_count(term.left, inside) or contains_elem_outside_count(term.right, inside)
    if isinstance(term, BoolOp):
        return any(contains_elem_outside_count(a, inside) for a in term.args)
    return False


# -- evaluation -----------------------------------------------------------------


def _compare(op, a, b):
    if isinstance(a, bool) != isinstance(b, bool) or isinstance(a, str) != isinstance(b, str):
        raise EvaluationError(f"cannot compare {a!r} with {b!r}")
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if isinstance(a, (bool, str)) or not isinstance(a, (int, type(b))):
        if isinstance(a, (bool, str)):
            raise EvaluationError(f"ordering comparison {op} on {a!r}")
    try:
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
    except TypeError as exc:
        raise EvaluationError(str(exc)) from None
    raise EvaluationError(f"unknown operator {op!r}")


def evaluate(term: Term, valuation: Mapping, elem=None) -> Value:
    """Evaluate ``term`` with variables bound by ``valuation`` (keys are LocVar/Param)."""
    t = type(term)
    if t is Const:
        return term.value
    if t is LocVar or t is Param:
        try:
            return valuation[term]
        except KeyError:
            raise EvaluationError(f"unbound variable {term}") from None
    if t is Compare:
        return _compare(term.op, evaluate(term.left, valuation, elem), evaluate(term.right, valuation, elem))
    if t is BoolOp:
        if term.op == "and":
            for a in term.args:
                if not _truth(evaluate(a, valuation, elem)):
                    return False
            return True
        for a in term.args:
            if _truth(evaluate(a, valuation, elem)):
                return True
        return False
    if t is AttrGet:
        s = evaluate(term.operand, valuation, elem)
        try:
            return s[term.key]
        except (KeyError, TypeError):
            raise EvaluationError(f"no attribute {term.key!r} in {s!r}") from None
    if t is Elem:
        if elem is None:
            raise EvaluationError("element reference outside a count")
        return elem[0]
    if t is CountWhere:
        arr = evaluate(term.array, valuation, elem)
        if not isinstance(arr, tuple):
            raise EvaluationError(f"count over a non-array {arr!r}")
        n = sum(1 for e in arr if _truth(evaluate(term.predicate, valuation, (e,))))
        if term.cmp == "=length":
            return n == len(arr)
        if term.cmp == ">=":
            return n >= term.count
        if term.cmp == "<=":
            return n <= term.count
        return n == term.count
    if t is InRange:
        return domain_contains(term.domain, evaluate(term.operand, valuation, elem))
    raise EvaluationError(f"not a term: {term!r}")


def _truth(v) -> bool:
    if not isinstance(v, bool):
        raise EvaluationError(f"expected a boolean, got {v!r}")
    return v


# -- typing ---------------------------------------------------------------------


def term_type(term: Term, var_types: Mapping[str, Type], elem: Optional[Type] = None) -> Type:
    """Type of ``term``; variables are looked up by name. Raises TermTypeError."""
    if isinstance(term, Const):
        return type_of(term.value)
    if isinstance(term, (LocVar, Param)):
        try:
            return var_types[term.name]
        except KeyError:
            raise TermTypeError(f"unknown variable {term}") from None
    if isinstance(term, Elem):
        if elem is None:
            raise TermTypeError("element reference outside a count")
        return elem
    if isinstance(term, AttrGet):
        st = term_type(term.operand, var_types, elem)
        if not isinstance(st, StructType) or term.key not in st.keys:
            raise TermTypeError(f"{st} has no attribute {term.key!r}")
        return st.attribute(term.key)
    if isinstance(term, Compare):
        lt = term_type(term.left, var_types, elem)
        rt = term_type(term.right, var_types, elem)
        if not isinstance(lt, PrimType) or not isinstance(rt, PrimType):
            raise TermTypeError(f"comparison of non-primitive types {lt} and {rt}")
        if lt != rt:
            raise TermTypeError(f"comparison of {lt} with {rt}")
        if term.op not in ("=", "!=") and lt not in (T_INTEGER, T_DECIMAL):
            raise TermTypeError(f"ordering comparison on {lt}")
        return T_BOOLEAN
    if isinstance(term, InRange):
        ot = term_type(term.operand, var_types, elem)
        if ot != term.domain.type:
            raise TermTypeError(f"{ot} value tested against a {term.domain.type} range")
        return T_BOOLEAN
    if isinstance(term, BoolOp):
        for a in term.args:
            if term_type(a, var_types, elem) != T_BOOLEAN:
                raise TermTypeError(f"non-boolean operand of {term.op}")
        return T_BOOLEAN
    if isinstance(term, CountWhere):
        at = term_type(term.array, var_types, elem)
        if not isinstance(at, ArrayType):
            raise TermTypeError(f"count over non-array {at}")
        if term_type(term.predicate, var_types, at.element) != T_BOOLEAN:
            raise TermTypeError("count predicate is not boolean")
        return T_BOOLEAN
    raise TermTypeError(f"not a term: {term!r}")


# -- transition systems -----------------------------------------------------------


@dataclass(frozen=True)
class VarBinding:
    """A declared identifier: one location variable and one parameter of equal sort."""

    id: str
    type: Type
    domain: Domain

    @property
    def location_var(self) -> LocVar:
        return LocVar(self.id)

    @property
    def parameter(self) -> Param:
        return Param(self.id)


@dataclass(frozen=True)
class Switch:
    id: str
    source: str
    gate: str
    params: tuple[str, ...]
    guard: Term
    assignment: tuple[tuple[str, Term], ...]
    target: str
    direction: str
    scenario: str = ""
    step: int = 0
    text: str = ""

    @property
    def interaction(self) -> tuple[str, tuple[str, ...]]:
        return self.gate, self.params

    def assigned(self) -> dict[str, Term]:
        return dict(self.assignment)


@dataclass(frozen=True)
class Sts:
    locations: tuple[str, ...]
    initial: str
    variables: tuple[VarBinding, ...]
    input_gates: tuple[str, ...]
    output_gates: tuple[str, ...]
    interactions: Mapping[str, tuple[str, ...]]
    switches: tuple[Switch, ...]
    annotations: Mapping[str, str] = field(default_factory=dict)
    name: str = ""

    def outgoing(self, location: str) -> list[Switch]:
        return [s for s in self.switches if s.source == location]

    def switch(self, switch_id: str) -> Switch:
        for s in self.switches:
            if s.id == switch_id:
                return s
        raise KeyError(switch_id)

    def binding(self, var_id: str) -> VarBinding:
        for b in self.variables:
            if b.id == var_id:
                return b
        raise KeyError(var_id)

    def var_types(self) -> dict[str, Type]:
        return {b.id: b.type for b in self.variables}

    def reachable(self) -> list[str]:
        seen = {self.initial}
        order = [self.initial]
        queue = deque([self.initial])
        succ: dict[str, list[str]] = {}
        for s in self.switches:
            succ.setdefault(s.source, []).append(s.target)
        while queue:
            loc = queue.popleft()
            for nxt in succ.get(loc, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    order.append(nxt)
                    queue.append(nxt)
        return order

    def with_switches(self, switches, locations=None) -> "Sts":
        return replace(self, switches=tuple(switches),
                       locations=self.locations if locations is None else tuple(locations))


def sink_locations(sts: Sts) -> list[str]:
    """Locations reachable from the initial one that have no outgoing switch.

    Unreachable locations are excluded: choice composition leaves the old
    initial locations of its operands behind without outgoing switches, and
    those must not be treated as places where a following STS is glued on.
    """
    has_out = {s.source for s in sts.switches}
    return [loc for loc in sts.reachable() if loc not in has_out]


def validate(sts: Sts) -> list[str]:
    """Every violated structural invariant, as ``"<category>: <detail>"`` strings."""
    problems = []
    locs = set(sts.locations)
    if sts.initial not in locs:
        problems.append(f"locations: initial location {sts.initial!r} is not a location")
    if len(locs) != len(sts.locations):
        problems.append("locations: duplicate location")
    both = set(sts.input_gates) & set(sts.output_gates)
    if both:
        problems.append(f"gates: gates {sorted(both)} are both input and output")
    var_names = {b.id for b in sts.variables}
    types = sts.var_types()
    for gate, params in sts.interactions.items():
        if len(set(params)) != len(params):
            problems.append(f"interaction: gate {gate!r} repeats a parameter")
        for p in params:
            if p not in var_names:
                problems.append(f"interaction: gate {gate!r} uses unknown parameter {p!r}")
    seen_params: dict[str, tuple[str, ...]] = {}
    ids = set()
    for s in sts.switches:
        if s.id in ids:
            problems.append(f"switch: duplicate switch id {s.id!r}")
        ids.add(s.id)
        for end in (s.source, s.target):
            if end not in locs:
                problems.append(f"switch {s.id}: location {end!r} does not exist")
        if s.gate in seen_params and seen_params[s.gate] != s.params:
            problems.append(f"interaction inconsistency: gate {s.gate!r} used with {list(seen_params[s.gate])} "
                            f"and {list(s.params)}")
        seen_params.setdefault(s.gate, s.params)
        if sts.interactions.get(s.gate, s.params) != s.params:
            problems.append(f"interaction inconsistency: switch {s.id} disagrees with the interaction of {s.gate!r}")
        expected = INPUT if s.gate in sts.input_gates else OUTPUT if s.gate in sts.output_gates else None
        if expected is None:
            problems.append(f"switch {s.id}: gate {s.gate!r} is not declared")
        elif expected != s.direction:
            problems.append(f"switch {s.id}: direction {s.direction} does not match gate {s.gate!r}")
        terms = [s.guard] + [t for _, t in s.assignment]
        for term in terms:
            for v in free_vars(term):
                if isinstance(v, Param) and v.name not in s.params:
                    problems.append(f"parameter scope: switch {s.id} uses parameter {v.name!r} of another switch")
                elif isinstance(v, LocVar) and v.name not in var_names:
                    problems.append(f"variable: switch {s.id} uses unknown location variable {v.name!r}")
            if contains_elem_outside_count(term):
                problems.append(f"element scope: switch {s.id} refers to an element outside a count")
        try:
            if term_type(s.guard, types) != T_BOOLEAN:
                problems.append(f"type: guard of switch {s.id} is not boolean")
            for var, term in s.assignment:
                if var not in types:
                    problems.append(f"variable: switch {s.id} assigns unknown variable {var!r}")
                elif term_type(term, types) != types[var]:
                    problems.append(f"type: switch {s.id} assigns a {term_type(term, types)} to {var!r}")
        except TermTypeError as exc:
            problems.append(f"type: switch {s.id}: {exc}")
    return problems


# -- canonical form for structural comparison -------------------------------------

_NEGATE = {"=": "!=", "!=": "=", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}
_FLIP = {">": "<", ">=": "<="}


def negate(term: Term) -> Optional[Term]:
    """Negation pushed to the atoms, or None when the term has no negatable form."""
    if isinstance(term, Compare):
        return Compare(_NEGATE[term.op], term.left, term.right)
    if isinstance(term, BoolOp):
        parts = [negate(a) for a in term.args]
        if any(p is None for p in parts):
            return None
        return BoolOp("or" if term.op == "and" else "and", tuple(parts))
    if isinstance(term, Const) and isinstance(term.value, bool):
        return Const(not term.value)
    return None


def canonical(term: Term) -> Term:
    """A normal form under which logically equal guard shapes coincide.

    Applied rewrites: flattening of and/or, removal of neutral constants,
    ``x = true`` to ``x``, ``a > b`` to ``b < a``, ``all elements satisfy P``
    to ``no element satisfies not P`` when P is negatable, and sorting of
    and/or arguments.
    """
    term = normalize(term)
    if isinstance(term, Compare):
        left, right = canonical(term.left), canonical(term.right)
        if term.op == "=" and right == TRUE:
            return left
        if term.op in _FLIP:
            return Compare(_FLIP[term.op], right, left)
        return Compare(term.op, left, right)
    if isinstance(term, BoolOp):
        args = normalize(BoolOp(term.op, tuple(canonical(a) for a in term.args)))
        if isinstance(args, BoolOp):
            return BoolOp(args.op, tuple(sorted(args.args, key=repr)))
        return args
    if isinstance(term, CountWhere):
        if term.cmp == "=length":
            neg = negate(term.predicate)
            if neg is not None:
                return CountWhere(canonical(term.array), canonical(neg), "=", 0)
        return CountWhere(canonical(term.array), canonical(term.predicate), term.cmp, term.count)
    if isinstance(term, AttrGet):
        return AttrGet(canonical(term.operand), term.key)
    if isinstance(term, InRange):
        return InRange(canonical(term.operand), term.domain)
    return term
