"""Canonical JSON documents for STS models, test suites, sample plans and fixed values.

Every document carries ``"pickles-schema": 1``. Decimals are written as
strings so that their exact representation survives. Import errors name the
offending place with a JSON pointer.
"""

from __future__ import annotations

import json
from decimal import Decimal, InvalidOperation
from typing import Any, Mapping

from .sts import (
    ELEM,
    AttrGet,
    BoolOp,
    Compare,
    Const,
    CountWhere,
    Elem,
    InRange,
    LocVar,
    Param,
    Sts,
    Switch,
    VarBinding,
    validate,
)
from .syntax import INPUT, OUTPUT
from .testgen import FormalTestCase
from .translate import SuiteContext
from .values import (
    ArrayDomain,
    ArrayType,
    DecimalRange,
    DomainError,
    EnumDomain,
    IntRange,
    PrimType,
    SamplingPlan,
    Struct,
    StructDomain,
    StructType,
    Type,
    Value,
    domain_contains,
    type_of,
    value_has_type,
)

SCHEMA = 1
SCHEMA_KEY = "pickles-schema"


class SchemaError(ValueError):
    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer or "/"
        self.message = message


def dumps(doc: dict) -> bytes:
    return (json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def _load(data) -> dict:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("", "document must be an object")
    return doc


def _escape(key) -> str:
    return str(key).replace("~", "~0").replace("/", "~1")


def _get(obj, key, ptr, kind=None):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(ptr, f"missing field {key!r}")
    v = obj[key]
    if kind is not None and not (isinstance(v, kind) and not (kind is int and isinstance(v, bool))):
        raise SchemaError(f"{ptr}/{_escape(key)}", f"expected {getattr(kind, '__name__', kind)}")
    return v


def _check_schema(doc, kind):
    if doc.get(SCHEMA_KEY) != SCHEMA:
        raise SchemaError(f"/{SCHEMA_KEY}", f"unsupported schema version {doc.get(SCHEMA_KEY)!r}")
    if doc.get("kind") != kind:
        raise SchemaError("/kind", f"expected a {kind!r} document")


# -- types, domains, values -----------------------------------------------------


def type_to_json(t: Type) -> dict:
    if isinstance(t, PrimType):
        return {"kind": t.kind}
    if isinstance(t, ArrayType):
        return {"kind": "array", "element": type_to_json(t.element)}
    return {"kind": "struct", "attributes": [[k, type_to_json(a)] for k, a in t.attributes]}


def type_from_json(obj, ptr: str) -> Type:
    kind = _get(obj, "kind", ptr, str)
    if kind == "array":
        return ArrayType(type_from_json(_get(obj, "element", ptr), f"{ptr}/element"))
    if kind == "struct":
        attrs = _get(obj, "attributes", ptr, list)
        out = []
        for i, pair in enumerate(attrs):
            if not (isinstance(pair, list) and len(pair) == 2 and isinstance(pair[0], str)):
                raise SchemaError(f"{ptr}/attributes/{i}", "expected [key, type]")
            out.append((pair[0], type_from_json(pair[1], f"{ptr}/attributes/{i}/1")))
        try:
            return StructType(tuple(out))
        except DomainError as exc:
            raise SchemaError(f"{ptr}/attributes", str(exc)) from None
    try:
        return PrimType(kind)
    except DomainError as exc:
        raise SchemaError(f"{ptr}/kind", str(exc)) from None


def value_to_json(v: Value):
    if isinstance(v, (bool, int, str)):
        return v
    if isinstance(v, Decimal):
        return str(v)
    if isinstance(v, tuple):
        return [value_to_json(e) for e in v]
    if isinstance(v, Struct):
        return {k: value_to_json(x) for k, x in v.items()}
    raise TypeError(f"not a value: {v!r}")


def value_from_json(obj, t: Type, ptr: str) -> Value:
    if isinstance(t, PrimType):
        if t.kind == "decimal":
            if not isinstance(obj, str):
                raise SchemaError(ptr, "decimals are written as strings")
            try:
                v = Decimal(obj)
            except InvalidOperation:
                raise SchemaError(ptr, f"{obj!r} is not a decimal") from None
            if not v.is_finite():
                raise SchemaError(ptr, "decimal must be finite")
            return v
        if not value_has_type(obj, t):
            raise SchemaError(ptr, f"expected a {t.kind}")
        return obj
    if isinstance(t, ArrayType):
        if not isinstance(obj, list):
            raise SchemaError(ptr, "expected an array")
        return tuple(value_from_json(e, t.element, f"{ptr}/{i}") for i, e in enumerate(obj))
    if not isinstance(obj, dict) or set(obj) != set(t.keys):
        raise SchemaError(ptr, f"expected a structure with keys {list(t.keys)}")
    return Struct(tuple((k, value_from_json(obj[k], a, f"{ptr}/{_escape(k)}")) for k, a in t.attributes))


def domain_to_json(d) -> dict:
    if isinstance(d, EnumDomain):
        return {"kind": "enum", "type": d.type.kind, "values": [value_to_json(v) for v in d.values]}
    if isinstance(d, IntRange):
        return {"kind": "int-range", "lo": d.lo, "hi": d.hi}
    if isinstance(d, DecimalRange):
        return {"kind": "decimal-range", "lo": str(d.lo), "hi": str(d.hi),
                "lo_open": d.lo_open, "hi_open": d.hi_open}
    if isinstance(d, ArrayDomain):
        return {"kind": "array", "element": domain_to_json(d.element), "min": d.min_len, "max": d.max_len}
    return {"kind": "struct", "attributes": [[k, domain_to_json(x)] for k, x in d.attributes]}


def domain_from_json(obj, ptr: str):
    kind = _get(obj, "kind", ptr, str)
    try:
        if kind == "enum":
            t = type_from_json({"kind": _get(obj, "type", ptr, str)}, f"{ptr}/type")
            values = _get(obj, "values", ptr, list)
            return EnumDomain(t, tuple(value_from_json(v, t, f"{ptr}/values/{i}") for i, v in enumerate(values)))
        if kind == "int-range":
            return IntRange(_get(obj, "lo", ptr, int), _get(obj, "hi", ptr, int))
        if kind == "decimal-range":
            return DecimalRange(value_from_json(_get(obj, "lo", ptr), PrimType("decimal"), f"{ptr}/lo"),
                                value_from_json(_get(obj, "hi", ptr), PrimType("decimal"), f"{ptr}/hi"),
                                _get(obj, "lo_open", ptr, bool), _get(obj, "hi_open", ptr, bool))
        if kind == "array":
            return ArrayDomain(domain_from_json(_get(obj, "element", ptr), f"{ptr}/element"),
                               _get(obj, "min", ptr, int), _get(obj, "max", ptr, int))
        if kind == "struct":
            attrs = _get(obj, "attributes", ptr, list)
            out = []
            for i, pair in enumerate(attrs):
                if not (isinstance(pair, list) and len(pair) == 2 and isinstance(pair[0], str)):
                    raise SchemaError(f"{ptr}/attributes/{i}", "expected [key, domain]")
                out.append((pair[0], domain_from_json(pair[1], f"{ptr}/attributes/{i}/1")))
            return StructDomain(tuple(out))
    except DomainError as exc:
        raise SchemaError(ptr, str(exc)) from None
    raise SchemaError(f"{ptr}/kind", f"unknown domain kind {kind!r}")


# -- terms ----------------------------------------------------------------------


def term_to_json(t) -> dict:
    if isinstance(t, Const):
        return {"op": "const", "type": type_to_json(type_of(t.value)), "value": value_to_json(t.value)}
    if isinstance(t, LocVar):
        return {"op": "var", "name": t.name}
    if isinstance(t, Param):
        return {"op": "param", "name": t.name}
    if isinstance(t, Elem):
        return {"op": "elem"}
    if isinstance(t, AttrGet):
        return {"op": "attr", "of": term_to_json(t.operand), "key": t.key}
    if isinstance(t, Compare):
        return {"op": "compare", "cmp": t.op, "left": term_to_json(t.left), "right": term_to_json(t.right)}
    if isinstance(t, InRange):
        return {"op": "in-range", "of": term_to_json(t.operand), "domain": domain_to_json(t.domain)}
    if isinstance(t, BoolOp):
        return {"op": t.op, "args": [term_to_json(a) for a in t.args]}
    if isinstance(t, CountWhere):
        return {"op": "count", "array": term_to_json(t.array), "where": term_to_json(t.predicate),
                "cmp": t.cmp, "count": t.count}
    raise TypeError(f"not a term: {t!r}")


def term_from_json(obj, ptr: str):
    op = _get(obj, "op", ptr, str)
    if op == "const":
        t = type_from_json(_get(obj, "type", ptr), f"{ptr}/type")
        return Const(value_from_json(_get(obj, "value", ptr), t, f"{ptr}/value"))
    if op == "var":
        return LocVar(_get(obj, "name", ptr, str))
    if op == "param":
        return Param(_get(obj, "name", ptr, str))
    if op == "elem":
        return ELEM
    if op == "attr":
        return AttrGet(term_from_json(_get(obj, "of", ptr), f"{ptr}/of"), _get(obj, "key", ptr, str))
    if op == "compare":
        cmp = _get(obj, "cmp", ptr, str)
        if cmp not in ("=", "!=", "<", "<=", ">", ">="):
            raise SchemaError(f"{ptr}/cmp", f"unknown comparison {cmp!r}")
        return Compare(cmp, term_from_json(_get(obj, "left", ptr), f"{ptr}/left"),
                       term_from_json(_get(obj, "right", ptr), f"{ptr}/right"))
    if op == "in-range":
        return InRange(term_from_json(_get(obj, "of", ptr), f"{ptr}/of"),
                       domain_from_json(_get(obj, "domain", ptr), f"{ptr}/domain"))
    if op in ("and", "or"):
        args = _get(obj, "args", ptr, list)
        return BoolOp(op, tuple(term_from_json(a, f"{ptr}/args/{i}") for i, a in enumerate(args)))
    if op == "count":
        cmp = _get(obj, "cmp", ptr, str)
        if cmp not in (">=", "<=", "=", "=length"):
            raise SchemaError(f"{ptr}/cmp", f"unknown count comparison {cmp!r}")
        return CountWhere(term_from_json(_get(obj, "array", ptr), f"{ptr}/array"),
                          term_from_json(_get(obj, "where", ptr), f"{ptr}/where"),
                          cmp, _get(obj, "count", ptr, int))
    raise SchemaError(f"{ptr}/op", f"unknown term {op!r}")


# -- models -----------------------------------------------------------------------


def sts_to_json(s: Sts, ctx: SuiteContext) -> dict:
    return {
        SCHEMA_KEY: SCHEMA,
        "kind": "sts",
        "name": s.name,
        "locations": list(s.locations),
        "initial": s.initial,
        "variables": [{"id": b.id, "type": type_to_json(b.type), "domain": domain_to_json(b.domain)}
                      for b in s.variables],
        "input_gates": list(s.input_gates),
        "output_gates": list(s.output_gates),
        "interactions": {g: list(p) for g, p in s.interactions.items()},
        "annotations": dict(s.annotations),
        "attributes": sorted(ctx.attr_keys),
        "switches": [{
            "id": r.id, "source": r.source, "gate": r.gate, "params": list(r.params),
            "guard": term_to_json(r.guard),
            "assignment": [[v, term_to_json(t)] for v, t in r.assignment],
            "target": r.target, "direction": r.direction,
            "scenario": r.scenario, "step": r.step, "text": r.text,
        } for r in s.switches],
    }


def export_sts(s: Sts, ctx: SuiteContext) -> bytes:
    return dumps(sts_to_json(s, ctx))


def _str_list(obj, key, ptr) -> list[str]:
    items = _get(obj, key, ptr, list)
    for i, x in enumerate(items):
        if not isinstance(x, str):
            raise SchemaError(f"{ptr}/{key}/{i}", "expected a string")
    return items


def import_sts(data) -> tuple[Sts, SuiteContext]:
    doc = _load(data)
    _check_schema(doc, "sts")
    locations = _str_list(doc, "locations", "")
    initial = _get(doc, "initial", "", str)
    if initial not in locations:
        raise SchemaError("/initial", f"unknown location {initial!r}")
    bindings = {}
    for i, v in enumerate(_get(doc, "variables", "", list)):
        ptr = f"/variables/{i}"
        b = VarBinding(_get(v, "id", ptr, str), type_from_json(_get(v, "type", ptr), f"{ptr}/type"),
                       domain_from_json(_get(v, "domain", ptr), f"{ptr}/domain"))
        if b.domain.type != b.type:
            raise SchemaError(f"{ptr}/domain", "domain does not match the declared type")
        bindings[b.id] = b
    inputs = _str_list(doc, "input_gates", "")
    outputs = _str_list(doc, "output_gates", "")
    interactions = {}
    for g, params in _get(doc, "interactions", "", dict).items():
        interactions[g] = tuple(_str_list({"p": params}, "p", f"/interactions/{_escape(g)}"))
    annotations = _get(doc, "annotations", "", dict)
    for g, text in annotations.items():
        if not isinstance(text, str):
            raise SchemaError(f"/annotations/{_escape(g)}", "expected a string")
    switches = []
    loc_set = set(locations)
    for k, r in enumerate(_get(doc, "switches", "", list)):
        ptr = f"/switches/{k}"
        for end in ("source", "target"):
            if _get(r, end, ptr, str) not in loc_set:
                raise SchemaError(f"{ptr}/{end}", f"unknown location {r[end]!r}")
        direction = _get(r, "direction", ptr, str)
        if direction not in (INPUT, OUTPUT):
            raise SchemaError(f"{ptr}/direction", f"unknown direction {direction!r}")
        gate = _get(r, "gate", ptr, str)
        if gate not in inputs and gate not in outputs:
            raise SchemaError(f"{ptr}/gate", f"undeclared gate {gate!r}")
        assignment = []
        for i, pair in enumerate(_get(r, "assignment", ptr, list)):
            if not (isinstance(pair, list) and len(pair) == 2 and isinstance(pair[0], str)):
                raise SchemaError(f"{ptr}/assignment/{i}", "expected [variable, term]")
            assignment.append((pair[0], term_from_json(pair[1], f"{ptr}/assignment/{i}/1")))
        switches.append(Switch(
            id=_get(r, "id", ptr, str), source=r["source"], gate=gate,
            params=tuple(_str_list(r, "params", ptr)),
            guard=term_from_json(_get(r, "guard", ptr), f"{ptr}/guard"),
            assignment=tuple(assignment), target=r["target"], direction=direction,
            scenario=_get(r, "scenario", ptr, str), step=_get(r, "step", ptr, int),
            text=_get(r, "text", ptr, str)))
    sts = Sts(tuple(locations), initial, tuple(bindings.values()), tuple(inputs), tuple(outputs),
              interactions, tuple(switches), dict(annotations), _get(doc, "name", "", str))
    problems = validate(sts)
    if problems:
        raise SchemaError("/switches", "; ".join(problems))
    attrs = _str_list(doc, "attributes", "")
    ctx = SuiteContext(bindings, {a: a for a in attrs})
    for g in inputs:
        ctx.gates[(INPUT, annotations.get(g, g))] = g
    for g in outputs:
        ctx.gates[(OUTPUT, annotations.get(g, g))] = g
    ctx.interactions = dict(interactions)
    ctx.annotations = dict(annotations)
    return sts, ctx


# -- test suites ----------------------------------------------------------------------


def tests_to_json(tests) -> dict:
    return {
        SCHEMA_KEY: SCHEMA,
        "kind": "tests",
        "tests": [{
            "switches": list(tc.switches),
            "ini": {k: value_to_json(v) for k, v in tc.ini.items()},
            "values": [[value_to_json(v) for v in vals] for vals in tc.values],
        } for tc in tests],
    }


def export_tests(tests) -> bytes:
    return dumps(tests_to_json(tests))


def import_tests(data, model: Sts, ctx: SuiteContext) -> list[FormalTestCase]:
    doc = _load(data)
    _check_schema(doc, "tests")
    by_id = {r.id: r for r in model.switches}
    out = []
    for i, t in enumerate(_get(doc, "tests", "", list)):
        ptr = f"/tests/{i}"
        ids = _str_list(t, "switches", ptr)
        for j, s in enumerate(ids):
            if s not in by_id:
                raise SchemaError(f"{ptr}/switches/{j}", f"unknown switch {s!r}")
        ini_obj = _get(t, "ini", ptr, dict)
        ini = {}
        for name in ini_obj:
            if name not in ctx.bindings:
                raise SchemaError(f"{ptr}/ini/{_escape(name)}", f"unknown variable {name!r}")
        for name, b in ctx.bindings.items():
            if name not in ini_obj:
                raise SchemaError(f"{ptr}/ini", f"missing initial value for {name!r}")
            vptr = f"{ptr}/ini/{_escape(name)}"
            ini[name] = value_from_json(ini_obj[name], b.type, vptr)
            if not domain_contains(b.domain, ini[name]):
                raise SchemaError(vptr, "value lies outside the variable's domain")
        seqs = _get(t, "values", ptr, list)
        if len(seqs) != len(ids):
            raise SchemaError(f"{ptr}/values", f"expected {len(ids)} value sequences")
        values = []
        for j, (s, seq) in enumerate(zip(ids, seqs)):
            r = by_id[s]
            sptr = f"{ptr}/values/{j}"
            if not isinstance(seq, list) or len(seq) != len(r.params):
                raise SchemaError(sptr, f"expected {len(r.params)} values for switch {s}")
            vals = []
            for k, (p, v) in enumerate(zip(r.params, seq)):
                x = value_from_json(v, ctx.bindings[p].type, f"{sptr}/{k}")
                if not domain_contains(ctx.bindings[p].domain, x):
                    raise SchemaError(f"{sptr}/{k}", "value lies outside the parameter's domain")
                vals.append(x)
            values.append(tuple(vals))
        out.append(FormalTestCase(tuple(ids), ini, tuple(values)))
    return out


# -- auxiliary files ------------------------------------------------------------------


def load_plan(data) -> SamplingPlan:
    """Sample plan from ``{"path": ["1.5", ...]}``, optionally wrapped as ``{"samples": ..., "epsilon": ...}``."""
    doc = _load(data)
    if isinstance(doc.get("samples"), dict):
        samples, eps = doc["samples"], doc.get("epsilon")
    else:
        samples, eps = doc, None
    plan: dict[str, tuple] = {}
    for path, items in samples.items():
        if path == SCHEMA_KEY:
            continue
        if not isinstance(items, list) or not items:
            raise SchemaError(f"/{_escape(path)}", "expected a non-empty list of decimal strings")
        plan[path] = tuple(value_from_json(x, PrimType("decimal"), f"/{_escape(path)}/{i}")
                           for i, x in enumerate(items))
    kwargs: dict[str, Any] = {"samples": plan}
    if eps is not None:
        kwargs["epsilon"] = value_from_json(eps, PrimType("decimal"), "/epsilon")
    return SamplingPlan(**kwargs)


def load_fixed(data, ctx: SuiteContext) -> dict[str, Value]:
    doc = _load(data)
    out = {}
    for name, v in doc.items():
        if name == SCHEMA_KEY:
            continue
        if name not in ctx.bindings:
            raise SchemaError(f"/{_escape(name)}", f"unknown variable {name!r}")
        b = ctx.bindings[name]
        out[name] = value_from_json(v, b.type, f"/{_escape(name)}")
        if not domain_contains(b.domain, out[name]):
            raise SchemaError(f"/{_escape(name)}", "value lies outside the variable's domain")
    return out


def fixed_to_json(values: Mapping[str, Value]) -> dict:
    return {k: value_to_json(v) for k, v in values.items()}
