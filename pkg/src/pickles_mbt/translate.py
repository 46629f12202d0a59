"""Mapping of parsed Pickles suites to symbolic transition systems.

One STS is produced per scenario. Every When step becomes an input switch
and every Then step an output switch; the Given guard is conjoined onto the
first switch and every step stores its parameters into the location
variables of the same name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Optional

from .parser import PicklesSemanticError
from .printer import step_lines
from .syntax import (
    INPUT,
    OUTPUT,
    ArrayGuardAst,
    ArrayTypeAst,
    GuardBlockAst,
    IndexedValueAst,
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
    VarRefAst,
)
from .sts import (
    ELEM,
    TRUE,
    AttrGet,
    Compare,
    Const,
    CountWhere,
    InRange,
    LocVar,
    Param,
    Sts,
    Switch,
    Term,
    TermTypeError,
    VarBinding,
    conj,
    disj,
    normalize,
    term_type,
)
from .values import (
    BOOLEAN,
    DECIMAL,
    INTEGER,
    ArrayDomain,
    ArrayType,
    DecimalRange,
    DomainError,
    EnumDomain,
    IntRange,
    PrimType,
    Struct,
    StructDomain,
    StructType,
    Type,
    Value,
)

GIVEN = "given"
STEP = "step"

_INT_RE = re.compile(r"-?\d+\Z")
_DEC_RE = re.compile(r"-?\d+(\.\d+)?\Z")


class TranslationError(PicklesSemanticError):
    pass


# -- literals -----------------------------------------------------------------


def parse_literal(text: str, t: PrimType, quoted: bool = False) -> Value:
    """Interpret a textual literal at primitive type ``t``; raises ``DomainError``."""
    if t.kind == BOOLEAN:
        if not quoted and text in ("true", "false"):
            return text == "true"
    elif t.kind == INTEGER:
        if not quoted and _INT_RE.match(text):
            return int(text)
    elif t.kind == DECIMAL:
        if not quoted and _DEC_RE.match(text):
            try:
                return Decimal(text)
            except InvalidOperation:  # pragma: no cover - regex guards this
                pass
    else:
        return text
    raise DomainError(f"{text!r} is not a valid {t.kind} value")


def decode_value(ast, t: Type) -> Value:
    """Typed value from a test-case value AST (1-based indexed arrays, keyed structs)."""
    if isinstance(t, PrimType):
        if not isinstance(ast, ScalarValueAst):
            raise DomainError(f"expected a {t.kind} value")
        return parse_literal(ast.text, t, ast.quoted and t.kind != "string")
    if isinstance(t, ArrayType):
        if not isinstance(ast, IndexedValueAst):
            raise DomainError("expected an indexed array value")
        indices = [i for i, _ in ast.entries]
        if indices != list(range(1, len(indices) + 1)):
            raise DomainError(f"array indices must be 1..n in order, got {indices}")
        return tuple(decode_value(v, t.element) for _, v in ast.entries)
    if isinstance(t, StructType):
        if not isinstance(ast, StructValueAst):
            raise DomainError("expected a struct value")
        given = dict(ast.pairs)
        if set(given) != set(t.keys) or len(given) != len(ast.pairs):
            raise DomainError(f"struct keys {sorted(given)} do not match {list(t.keys)}")
        return Struct(tuple((k, decode_value(given[k], at)) for k, at in t.attributes))
    raise DomainError(f"unknown type {t!r}")


def _range_domain(r: RangeAst, t: PrimType):
    if r.kind == "set":
        return EnumDomain(t, tuple(parse_literal(x, t) for x in r.items))
    if t.kind not in (INTEGER, DECIMAL):
        raise DomainError(f"a {t.kind} cannot have an interval range")
    if len(r.items) == 1:
        v = parse_literal(r.items[0], t)
        return IntRange(v, v) if t.kind == INTEGER else DecimalRange(v, v, False, False)
    lo, hi = (parse_literal(x, t) for x in r.items)
    if t.kind == INTEGER:
        return IntRange(lo + r.lo_open, hi - r.hi_open)
    return DecimalRange(lo, hi, r.lo_open, r.hi_open)


def type_and_domain(td) -> tuple[Type, object]:
    if isinstance(td, PrimTypeAst):
        t = PrimType(td.kind)
        return t, _range_domain(td.range, t)
    if isinstance(td, ArrayTypeAst):
        et, ed = type_and_domain(td.element)
        if td.mode == "at most":
            lo, hi = 1, td.bounds[0]
        elif td.mode == "exactly":
            lo = hi = td.bounds[0]
        else:
            lo, hi = td.bounds
        return ArrayType(et), ArrayDomain(ed, lo, hi)
    if isinstance(td, StructTypeAst):
        descs = dict(td.descriptions)
        if set(descs) != set(td.attributes):
            raise DomainError(f"attributes {list(td.attributes)} are not all described")
        pairs = [(a, type_and_domain(descs[a])) for a in td.attributes]
        return (StructType(tuple((a, tp) for a, (tp, _) in pairs)),
                StructDomain(tuple((a, d) for a, (_, d) in pairs)))
    raise DomainError(f"unknown type description {td!r}")


# -- context ------------------------------------------------------------------


@dataclass
class SuiteContext:
    """Variables, attribute keys, gates, and interactions shared by a suite's STSs."""

    bindings: dict[str, VarBinding]
    attr_keys: dict[str, str] = field(default_factory=dict)
    gates: dict[tuple[str, str], str] = field(default_factory=dict)  # (direction, action) -> gate
    interactions: dict[str, tuple[str, ...]] = field(default_factory=dict)
    annotations: dict[str, str] = field(default_factory=dict)  # gate -> action text

    @property
    def input_gates(self) -> tuple[str, ...]:
        return tuple(g for (d, _), g in self.gates.items() if d == INPUT)

    @property
    def output_gates(self) -> tuple[str, ...]:
        return tuple(g for (d, _), g in self.gates.items() if d == OUTPUT)

    def var_types(self) -> dict[str, Type]:
        return {k: b.type for k, b in self.bindings.items()}

    def gate_for(self, direction: str, action: str) -> str:
        return self.gates[(direction, action)]


def _collect_attrs(t: Type, out: dict):
    if isinstance(t, ArrayType):
        _collect_attrs(t.element, out)
    elif isinstance(t, StructType):
        for k, at in t.attributes:
            out[k] = k
            _collect_attrs(at, out)


def build_context(ast: SpecSuiteAst) -> SuiteContext:
    bindings: dict[str, VarBinding] = {}
    for decl in ast.variables:
        if decl.var_id in bindings:
            raise TranslationError(f'variable "{decl.var_id}" is declared twice')
        try:
            t, d = type_and_domain(decl.type_desc)
        except DomainError as exc:
            raise TranslationError(f'variable "{decl.var_id}": {exc}') from None
        bindings[decl.var_id] = VarBinding(decl.var_id, t, d)
    ctx = SuiteContext(bindings)
    for b in bindings.values():
        _collect_attrs(b.type, ctx.attr_keys)
    clash = set(ctx.attr_keys) & set(bindings)
    if clash:
        raise TranslationError(f"identifiers used both as variables and attributes: {sorted(clash)}")
    counters = {INPUT: 0, OUTPUT: 0}
    for sc in ast.scenarios:
        for step in sc.when + sc.then:
            key = (step.direction, step.action)
            if key not in ctx.gates:
                counters[step.direction] += 1
                gate = ("i" if step.direction == INPUT else "o") + str(counters[step.direction])
                ctx.gates[key] = gate
                ctx.interactions[gate] = step.params
                ctx.annotations[gate] = step.action
            gate = ctx.gates[key]
            if ctx.interactions[gate] != step.params:
                raise TranslationError(
                    f'interaction inconsistency: "{step.action}" used with parameters '
                    f"{list(ctx.interactions[gate])} and {list(step.params)}")
            for p in step.params:
                if p not in bindings:
                    raise TranslationError(f'undeclared parameter "{p}" in step "{step.action}"')
    return ctx


# -- guards -------------------------------------------------------------------


def _combine(terms: list[Term], connectives) -> Term:
    """AND binds tighter than OR; both associate to the left."""
    groups = [[terms[0]]]
    for c, t in zip(connectives, terms[1:]):
        if c == "AND":
            groups[-1].append(t)
        else:
            groups.append([t])
    return disj(*(conj(*g) for g in groups))


class _GuardMapper:
    def __init__(self, ctx: SuiteContext, position: str, step_params):
        self.ctx = ctx
        self.position = position
        self.step_params = frozenset(step_params)
        self.types = ctx.var_types()

    def ref(self, r: VarRefAst) -> Term:
        if r.var_id not in self.ctx.bindings:
            raise TranslationError(f'unknown variable "{r.var_id}"')
        if self.position == GIVEN or r.stored or r.var_id not in self.step_params:
            return LocVar(r.var_id)
        return Param(r.var_id)

    def block(self, gb: GuardBlockAst) -> Term:
        terms = []
        for r, g in gb.clauses:
            subject = self.ref(r)
            terms.append(self.guard(g, subject, self.ctx.bindings[r.var_id].type, r.var_id))
        return _combine(terms, gb.connectives)

    def guard(self, g, subject: Term, t: Type, name: str) -> Term:
        if isinstance(g, PrimGuardAst):
            return self.prim(g, subject, t, name)
        if isinstance(g, ArrayGuardAst):
            if not isinstance(t, ArrayType):
                raise TranslationError(f'"{name}" is not an array')
            pred = self.guard(g.element, ELEM, t.element, f"{name} element")
            cmp = {"at least": ">=", "at most": "<=", "exactly": "=", "all": "=length"}[g.quantifier]
            return CountWhere(subject, pred, cmp, 0 if g.count is None else g.count)
        if isinstance(g, StructGuardAst):
            if not isinstance(t, StructType):
                raise TranslationError(f'"{name}" is not a structure')
            terms = []
            for attr, sub in g.clauses:
                if attr not in t.keys:
                    raise TranslationError(f'"{name}" has no attribute "{attr}"')
                terms.append(self.guard(sub, AttrGet(subject, attr), t.attribute(attr), attr))
            return _combine(terms, g.connectives)
        raise TranslationError(f"unknown guard {g!r}")

    def operand(self, o, t: PrimType, name: str) -> Term:
        if isinstance(o, VarRefAst):
            term = self.ref(o)
            if self.types[o.var_id] != t:
                raise TranslationError(f'cannot compare "{name}" ({t}) with "{o.var_id}" ({self.types[o.var_id]})')
            return term
        try:
            return Const(parse_literal(o.text, t, o.quoted and t.kind != "string"))
        except DomainError as exc:
            raise TranslationError(f'"{name}": {exc}') from None

    def prim(self, g: PrimGuardAst, subject: Term, t: Type, name: str) -> Term:
        if not isinstance(t, PrimType):
            raise TranslationError(f'"{name}" is not a primitive variable')
        if isinstance(g.rhs, RangeAst):
            if g.op != "=":
                raise TranslationError(f'"{name}": a range can only follow "equal to"')
            try:
                return InRange(subject, _range_domain(g.rhs, t))
            except DomainError as exc:
                raise TranslationError(f'"{name}": {exc}') from None
        if g.op == "between":
            return conj(Compare(">=", subject, self.operand(g.rhs, t, name)),
                        Compare("<=", subject, self.operand(g.upper, t, name)))
        if g.op not in ("=", "!=") and t.kind not in (INTEGER, DECIMAL):
            raise TranslationError(f'"{name}": ordering comparison on a {t.kind}')
        return Compare(g.op, subject, self.operand(g.rhs, t, name))


def map_guard_block(gb: Optional[GuardBlockAst], ctx: SuiteContext, position: str = GIVEN,
                    step_params=()) -> Term:
    if gb is None:
        return TRUE
    term = _GuardMapper(ctx, position, step_params).block(gb)
    try:
        term_type(term, ctx.var_types())
    except TermTypeError as exc:
        raise TranslationError(str(exc)) from None
    return term


# -- scenarios ----------------------------------------------------------------


def step_text(step: StepAst) -> str:
    """Canonical source of a step without its When/Then/And keyword."""
    lines = step_lines(step, "")
    lines[0] = lines[0].lstrip()
    return "\n".join(lines)


def translate_scenario(sc: ScenarioAst, ctx: SuiteContext, prefix: str = "s") -> Sts:
    steps = list(sc.when) + list(sc.then)
    locations = tuple(f"{prefix}.l{j}" for j in range(len(steps) + 1))
    given_guard = sc.given.guard if sc.given is not None else None
    ig = map_guard_block(given_guard, ctx, GIVEN)
    switches = []
    for j, step in enumerate(steps):
        guard = map_guard_block(step.guard, ctx, STEP, step.params)
        if j == 0:
            guard = conj(guard, ig)
        switches.append(Switch(
            id=f"{prefix}.r{j}",
            source=locations[j],
            gate=ctx.gate_for(step.direction, step.action),
            params=step.params,
            guard=normalize(guard),
            assignment=tuple((p, Param(p)) for p in step.params),
            target=locations[j + 1],
            direction=step.direction,
            scenario=sc.title,
            step=j,
            text=step_text(step),
        ))
    return Sts(
        locations=locations,
        initial=locations[0],
        variables=tuple(ctx.bindings.values()),
        input_gates=ctx.input_gates,
        output_gates=ctx.output_gates,
        interactions=dict(ctx.interactions),
        switches=tuple(switches),
        annotations=dict(ctx.annotations),
        name=sc.title,
    )


@dataclass
class TranslationResult:
    primary: list[Sts]
    secondary: list[Sts]
    context: SuiteContext
    all: list[Sts]


def translate_suite(ast: SpecSuiteAst) -> TranslationResult:
    ctx = build_context(ast)
    primary, secondary, every = [], [], []
    for i, sc in enumerate(ast.scenarios, start=1):
        sts = translate_scenario(sc, ctx, f"s{i}")
        every.append(sts)
        if sc.given is not None and sc.given.initial:
            primary.append(sts)
        else:
            secondary.append(sts)
    return TranslationResult(primary, secondary, ctx, every)
