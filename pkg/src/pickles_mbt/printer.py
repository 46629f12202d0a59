"""Canonical text form of Pickles syntax trees."""

from __future__ import annotations

from .syntax import (
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
    TestCaseAst,
    TestInStepAst,
    TestWhenAst,
    ThenAst,
    VarRefAst,
)

OP_WORDS = {
    "=": "equal to",
    "!=": "not equal to",
    ">": "greater than",
    "<": "lower than",
    ">=": "greater or equal than",
    "<=": "lower or equal than",
    "between": "between",
}

INDENT = "  "
TEST_INDENT = "    "


def pretty_print(ast) -> str:
    if isinstance(ast, SpecSuiteAst):
        return _suite(ast)
    if isinstance(ast, TestCaseAst):
        return _testcase(ast)
    raise TypeError(f"cannot print {type(ast).__name__}")


# -- suites -------------------------------------------------------------------


def _suite(suite: SpecSuiteAst) -> str:
    lines = ["Variable Settings"]
    for decl in suite.variables:
        lines += _type_lines(f'"{decl.var_id}"', decl.type_desc, 0)
    for sc in suite.scenarios:
        lines.append("")
        lines += scenario_lines(sc)
    return "\n".join(lines) + "\n"


def _range(r: RangeAst) -> str:
    if r.kind == "set":
        return "{" + ", ".join(r.items) + "}"
    return ("(" if r.lo_open else "[") + ",".join(r.items) + (")" if r.hi_open else "]")


def _type_lines(head: str, td, depth: int) -> list[str]:
    pad = INDENT * depth
    if isinstance(td, PrimTypeAst):
        article = "an" if td.kind == "integer" else "a"
        return [f"{pad}{head} is {article} {td.kind} with range {_range(td.range)}"]
    if isinstance(td, ArrayTypeAst):
        if td.mode == "between":
            card = f"between {td.bounds[0]} and {td.bounds[1]}"
        else:
            card = f"{td.mode} {td.bounds[0]}"
        inner = _type_lines("", td.element, depth)
        first = inner[0][len(pad):].lstrip()
        return [f"{pad}{head} is an array of {card} elements where each element {first}"] + inner[1:]
    if isinstance(td, StructTypeAst):
        attrs = ", ".join(f'"{a}"' for a in td.attributes)
        lines = [f"{pad}{head} is a structure with attributes {attrs} such that:"]
        for attr, desc in td.descriptions:
            lines += _type_lines(f'"{attr}"', desc, depth + 1)
        return lines
    raise TypeError(td)


def scenario_lines(sc: ScenarioAst) -> list[str]:
    lines = [f"Scenario {sc.title}"]
    if sc.given is not None:
        lines += _given_lines(sc.given)
    for i, step in enumerate(sc.when):
        lines += step_lines(step, "When" if i == 0 else "And")
    for i, step in enumerate(sc.then):
        lines += step_lines(step, "Then" if i == 0 else "And")
    return lines


def _given_lines(g: GivenAst) -> list[str]:
    lines = []
    if g.initial:
        lines.append("Given the system is in its initial state")
        if g.description is None and g.guard is None:
            return lines
        prefix = "And "
    else:
        prefix = "Given "
    text = prefix + (g.description or "")
    if g.guard is None:
        return lines + [text.rstrip()]
    lines.append((text.rstrip() + " such that:"))
    return lines + guard_block_lines(g.guard, 1)


def _is_sugar(step: StepAst) -> bool:
    g = step.guard
    if g is None or len(step.params) != 1 or len(g.clauses) != 1:
        return False
    ref, guard = g.clauses[0]
    return ref == VarRefAst(step.params[0]) and isinstance(guard, PrimGuardAst)


def step_lines(step: StepAst, keyword: str) -> list[str]:
    """A When/Then/And step; one-line form for a single primitive guard."""
    head = f"{keyword} {step.action}"
    if not step.params:
        return [head]
    head += " " + ", ".join(f'"{p}"' for p in step.params)
    if _is_sugar(step):
        return [f"{head} {_prim(step.guard.clauses[0][1])}"]
    return [f"{head} such that:"] + guard_block_lines(step.guard, 1)


def _operand(o) -> str:
    if isinstance(o, VarRefAst):
        return ("stored " if o.stored else "") + f'"{o.var_id}"'
    if isinstance(o, LiteralAst):
        if o.quoted:
            return "'" + o.text.replace("\\", "\\\\").replace("'", "\\'") + "'"
        return o.text
    if isinstance(o, RangeAst):
        return _range(o)
    raise TypeError(o)


def _prim(g: PrimGuardAst) -> str:
    if g.op == "between":
        return f"between {_operand(g.rhs)} and {_operand(g.upper)}"
    return f"{OP_WORDS[g.op]} {_operand(g.rhs)}"


def guard_block_lines(block: GuardBlockAst, depth: int) -> list[str]:
    lines: list[str] = []
    for i, (ref, guard) in enumerate(block.clauses):
        lines += _guard_lines(_operand(ref), guard, depth)
        if i < len(block.connectives):
            lines[-1] += " " + block.connectives[i]
    return lines


def _guard_lines(head: str, guard, depth: int) -> list[str]:
    pad = INDENT * depth
    if isinstance(guard, PrimGuardAst):
        return [f"{pad}{head} is {_prim(guard)}"]
    if isinstance(guard, ArrayGuardAst):
        q = "all" if guard.quantifier == "all" else f"{guard.quantifier} {guard.count}"
        inner = _guard_lines("", guard.element, depth)
        first = inner[0].strip()
        return [f"{pad}{head} has {q} elements where each element {first}"] + inner[1:]
    if isinstance(guard, StructGuardAst):
        lines = [f"{pad}{head} has attributes such that:"]
        for i, (attr, g) in enumerate(guard.clauses):
            lines += _guard_lines(f'"{attr}"', g, depth + 1)
            if i < len(guard.connectives):
                lines[-1] += " " + guard.connectives[i]
        return lines
    raise TypeError(guard)


# -- test cases ---------------------------------------------------------------


def _scalar(v: ScalarValueAst) -> str:
    if v.quoted:
        return '"' + v.text.replace("\\", "\\\\").replace('"', '\\"') + '"'
    return v.text


def _inline_value(v) -> str:
    if isinstance(v, ScalarValueAst):
        return _scalar(v)
    if isinstance(v, StructValueAst):
        return "{" + ", ".join(f'"{k}": {_inline_value(x)}' for k, x in v.pairs) + "}"
    if isinstance(v, IndexedValueAst):
        return "[" + ", ".join(f"{i}: {_inline_value(x)}" for i, x in v.entries) + "]"
    raise TypeError(v)


def value_def_lines(var_id: str, value, depth: int) -> list[str]:
    pad = TEST_INDENT * depth
    if isinstance(value, IndexedValueAst) and value.entries:
        lines = [f'{pad}"{var_id}":']
        inner = TEST_INDENT * (depth + 1)
        lines += [f"{inner}{i}: {_inline_value(x)}" for i, x in value.entries]
        return lines
    return [f'{pad}"{var_id}": {_inline_value(value)}']


def _testcase(tc: TestCaseAst) -> str:
    lines = ["Given the system is initialized with values:"]
    for vd in tc.given_values:
        lines += value_def_lines(vd.var_id, vd.value, 1)
    for block in tc.blocks:
        if isinstance(block, TestWhenAst):
            for i, step in enumerate(block.steps):
                lines += in_step_lines(step, "When" if i == 0 else "And")
        elif isinstance(block, ThenAst):
            for i, step in enumerate(block.steps):
                lines += step_lines(step, "Then" if i == 0 else "And")
    return "\n".join(lines) + "\n"


def in_step_lines(step: TestInStepAst, keyword: str) -> list[str]:
    head = f"{keyword} {step.action}"
    if not step.params:
        return [head]
    lines = [head + " " + ", ".join(f'"{p}"' for p in step.params) + " with values:"]
    for vd in step.values:
        lines += value_def_lines(vd.var_id, vd.value, 1)
    return lines

