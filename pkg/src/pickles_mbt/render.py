"""Back-translation of formal test cases into Pickles test-case text."""

from __future__ import annotations

from decimal import Decimal

from .printer import _inline_value, in_step_lines, value_def_lines
from .sts import Sts
from .syntax import INPUT, IndexedValueAst, ScalarValueAst, StructValueAst, TestInStepAst, ValueDefAst
from .testgen import FormalTestCase, path_of
from .values import ArrayType, StructType, Struct, Value, format_value

TEST_GIVEN = "Given the system is initialized with values:"
_NEEDS_QUOTES = set(',{}[]"\\')


class RenderError(ValueError):
    pass


def value_ast(v: Value):
    if isinstance(v, bool):
        return ScalarValueAst(format_value(v))
    if isinstance(v, Decimal):
        return ScalarValueAst(format(v, "f"))
    if isinstance(v, int):
        return ScalarValueAst(str(v))
    if isinstance(v, str):
        if "\n" in v or "\r" in v:
            raise RenderError(f"string value {v!r} does not fit on one line")
        quoted = not v or v != v.strip() or any(c in _NEEDS_QUOTES for c in v)
        return ScalarValueAst(v, quoted)
    if isinstance(v, tuple):
        return IndexedValueAst(tuple((i, value_ast(e)) for i, e in enumerate(v, start=1)))
    if isinstance(v, Struct):
        return StructValueAst(tuple((k, value_ast(x)) for k, x in v.items()))
    raise RenderError(f"cannot render {v!r}")


def render_value(v: Value) -> str:
    """Textual form of a value; a top-level array gives one ``i: value`` line per element."""
    ast = value_ast(v)
    if isinstance(ast, IndexedValueAst):
        return "\n".join(f"{i}: {_inline_value(x)}" for i, x in ast.entries)
    return _inline_value(ast)


def given_order(ctx) -> list[str]:
    """Declaration order, with primitive variables listed before arrays and structures."""
    names = list(ctx.bindings)
    composite = [n for n in names if isinstance(ctx.bindings[n].type, (ArrayType, StructType))]
    return [n for n in names if n not in composite] + composite


def render_test(tc: FormalTestCase, master: Sts, ctx) -> str:
    path = path_of(tc, master)
    lines = [TEST_GIVEN]
    for name in given_order(ctx):
        if name not in tc.ini:
            raise RenderError(f'no initial value for "{name}"')
        lines += value_def_lines(name, value_ast(tc.ini[name]), 1)
    previous = None
    for r, vals in zip(path, tc.values):
        if r.gate not in master.annotations:
            raise RenderError(f"gate {r.gate!r} has no action text")
        same = previous == r.direction
        if r.direction == INPUT:
            step = TestInStepAst(master.annotations[r.gate], r.params,
                                 tuple(ValueDefAst(p, value_ast(v)) for p, v in zip(r.params, vals)))
            lines += in_step_lines(step, "And" if same else "When")
        else:
            if not r.text:
                raise RenderError(f"output switch {r.id} has no step text")
            text_lines = r.text.split("\n")
            lines.append(("And " if same else "Then ") + text_lines[0])
            lines += text_lines[1:]
        previous = r.direction
    return "\n".join(lines) + "\n"


def rendered_file_name(suite: str, k: int) -> str:
    return f"{suite}_test_{k}.pickles"
