"""Recursive-descent parser for Pickles suites and test cases.

Block structure is carried by keywords, not indentation. Newlines matter
only as terminators of bare text (action strings, titles, unquoted values).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .syntax import (
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
    TestCaseAst,
    TestInStepAst,
    TestWhenAst,
    ThenAst,
    ValueDefAst,
    VarDeclAst,
    VarRefAst,
)

INITIAL_STATE = "the system is in its initial state"
TEST_GIVEN = "Given the system is initialized with values:"

# longest phrases first so "lower or equal than" wins over "lower than"
OPERATORS = (
    ("not equal to", "!="),
    ("equal to", "="),
    ("greater or equal than", ">="),
    ("lower or equal than", "<="),
    ("greater than", ">"),
    ("lower than", "<"),
    ("between", "between"),
)
PRIM_KINDS = ("boolean", "integer", "decimal", "string")
QUANTIFIERS = ("at least", "at most", "exactly")

_CONNECTIVE = re.compile(r"[ \t]+(AND|OR)(?=\s|$)")
_BETWEEN_AND = re.compile(r"[ \t]+and[ \t]+")
_INDEX = re.compile(r"(\d+)[ \t]*:")


class PicklesError(Exception):
    """Base class for structured Pickles diagnostics."""

    def __init__(self, message: str, line: int = 0, column: int = 0,
                 expected: Iterable[str] = (), filename: str = "<text>"):
        self.message = message
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        self.filename = filename
        super().__init__(str(self))

    def __str__(self):
        where = f"{self.filename}:{self.line}:{self.column}: " if self.line else f"{self.filename}: "
        exp = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        return f"{where}{self.message}{exp}"

    def as_dict(self) -> dict:
        return {
            "file": self.filename,
            "line": self.line,
            "column": self.column,
            "message": self.message,
            "expected": list(self.expected),
        }


class PicklesSyntaxError(PicklesError):
    pass


class PicklesSemanticError(PicklesError):
    pass


@dataclass
class _Symbols:
    var_ids: frozenset
    attr_ids: frozenset


class _Reader:
    def __init__(self, text: str, filename: str):
        self.text = text
        self.pos = 0
        self.filename = filename

    # -- positions and errors -------------------------------------------------

    def location(self, pos: Optional[int] = None) -> tuple[int, int]:
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def fail(self, message: str, expected: Iterable[str] = (), pos: Optional[int] = None):
        line, col = self.location(pos)
        raise PicklesSyntaxError(message, line, col, expected, self.filename)

    # -- whitespace -----------------------------------------------------------

    def skip_ws(self):
        text = self.text
        while self.pos < len(text):
            c = text[self.pos]
            if c in " \t\r\n":
                self.pos += 1
            elif c == "#" and self._at_line_start():
                nl = text.find("\n", self.pos)
                self.pos = len(text) if nl < 0 else nl
            else:
                break

    def skip_inline(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def _at_line_start(self) -> bool:
        i = self.pos - 1
        while i >= 0 and self.text[i] in " \t":
            i -= 1
        return i < 0 or self.text[i] == "\n"

    def at_eof(self) -> bool:
        return self.pos >= len(self.text)

    def at_eol(self) -> bool:
        save = self.pos
        self.skip_inline()
        result = self.at_eof() or self.text[self.pos] in "\r\n"
        self.pos = save
        return result

    def peek_char(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    # -- phrases --------------------------------------------------------------

    def _match_phrase(self, phrase: str, ignore_case: bool) -> Optional[int]:
        """End offset if ``phrase`` (single spaces = any inline whitespace) matches here."""
        words = phrase.split(" ")
        pattern = r"[ \t]+".join(re.escape(w) for w in words)
        if phrase[-1].isalnum():
            pattern += r"(?![\w])"
        m = re.compile(pattern, re.IGNORECASE if ignore_case else 0).match(self.text, self.pos)
        return m.end() if m else None

    def at(self, phrase: str, ignore_case: bool = False) -> bool:
        return self._match_phrase(phrase, ignore_case) is not None

    def accept(self, phrase: str, ignore_case: bool = False) -> bool:
        end = self._match_phrase(phrase, ignore_case)
        if end is None:
            return False
        self.pos = end
        return True

    def expect(self, phrase: str, *alternatives: str):
        if self.accept(phrase):
            return
        for alt in alternatives:
            if self.accept(alt):
                return
        found = self.text[self.pos:self.pos + 20].split("\n")[0]
        self.fail(f"unexpected {found!r}" if found else "unexpected end of input",
                  (phrase,) + alternatives)

    # -- lexemes --------------------------------------------------------------

    def quoted(self) -> str:
        if self.peek_char() != '"':
            self.fail("expected a quoted identifier", ('"<identifier>"',))
        end = self.text.find('"', self.pos + 1)
        nl = self.text.find("\n", self.pos + 1)
        if end < 0 or (0 <= nl < end):
            self.fail("unterminated quoted identifier")
        ident = self.text[self.pos + 1:end]
        if not ident.strip():
            self.fail("empty identifier")
        self.pos = end + 1
        return ident

    def quoted_string(self, quote: str) -> str:
        """A literal in ``quote`` with backslash escapes for the quote and backslash."""
        assert self.peek_char() == quote
        out = []
        i = self.pos + 1
        while i < len(self.text):
            c = self.text[i]
            if c == "\\" and i + 1 < len(self.text):
                out.append(self.text[i + 1])
                i += 2
                continue
            if c == quote:
                self.pos = i + 1
                return "".join(out)
            if c == "\n":
                break
            out.append(c)
            i += 1
        self.fail("unterminated string literal")

    def quoted_list(self) -> tuple[str, ...]:
        ids = [self.quoted()]
        while True:
            save = self.pos
            self.skip_inline()
            if self.peek_char() == ",":
                self.pos += 1
                self.skip_inline()
            if self.peek_char() == '"':
                ids.append(self.quoted())
            else:
                self.pos = save
                return tuple(ids)

    def rest_of_line(self) -> str:
        nl = self.text.find("\n", self.pos)
        end = len(self.text) if nl < 0 else nl
        s = self.text[self.pos:end]
        self.pos = end
        return s.strip()

    def natural(self) -> int:
        self.skip_inline()
        m = re.compile(r"\d+").match(self.text, self.pos)
        if not m:
            self.fail("expected a natural number", ("<N>",))
        self.pos = m.end()
        return int(m.group())


def _norm(text: str) -> str:
    return " ".join(text.split())


class _Parser:
    def __init__(self, text: str, filename: str, symbols: Optional[_Symbols] = None):
        self.r = _Reader(text, filename)
        self.symbols = symbols

    # -- suites ---------------------------------------------------------------

    def suite(self) -> SpecSuiteAst:
        r = self.r
        r.skip_ws()
        r.expect("Variable Settings")
        decls = []
        r.skip_ws()
        while r.peek_char() == '"':
            start = r.pos
            var_id = r.quoted()
            r.skip_inline()
            decls.append((start, VarDeclAst(var_id, self.type_desc(1))))
            r.skip_ws()
        self.symbols = _Symbols(
            frozenset(d.var_id for _, d in decls),
            frozenset(_attr_ids(d.type_desc for _, d in decls)),
        )
        scenarios = []
        r.skip_ws()
        while r.accept("Scenario"):
            scenarios.append((r.pos, self.scenario()))
            r.skip_ws()
        if not r.at_eof():
            r.fail("unexpected text", ("Scenario",) if scenarios else ('"<VarID>"', "Scenario"))
        if not scenarios:
            r.fail("a specification suite needs at least one scenario", ("Scenario",))
        suite = SpecSuiteAst(tuple(d for _, d in decls), tuple(s for _, s in scenarios))
        _check_suite(suite, decls, scenarios, r)
        return suite

    def type_desc(self, depth: int):
        r = self.r
        r.skip_inline()
        if r.accept("is an array of"):
            mode, bounds = self.cardinality()
            r.skip_inline()
            r.expect("elements where each element", "elements such that each element")
            element = self.type_desc(depth)
            return ArrayTypeAst(mode, bounds, element)
        if r.accept("is a structure with attributes"):
            r.skip_inline()
            attrs = r.quoted_list()
            r.skip_inline()
            r.expect("such that:")
            descs = []
            for _ in attrs:
                r.skip_ws()
                start = r.pos
                attr = r.quoted()
                if attr not in attrs:
                    r.fail(f"attribute {attr!r} is not listed in the structure header {list(attrs)}",
                           [f'"{a}"' for a in attrs], pos=start)
                if attr in (a for a, _ in descs):
                    r.fail(f"attribute {attr!r} described twice", pos=start)
                descs.append((attr, self.type_desc(depth + 1)))
            return StructTypeAst(tuple(attrs), tuple(descs))
        if not (r.accept("is an") or r.accept("is a")):
            r.fail("expected a type description", ("is a", "is an", "is an array of", "is a structure with attributes"))
        r.skip_inline()
        for kind in PRIM_KINDS:
            if r.accept(kind):
                break
        else:
            r.fail("unknown primitive type", PRIM_KINDS)
        r.skip_inline()
        r.expect("with range")
        return PrimTypeAst(kind, self.range_())

    def cardinality(self) -> tuple[str, tuple[int, ...]]:
        r = self.r
        r.skip_inline()
        if r.accept("at most"):
            return "at most", (r.natural(),)
        if r.accept("exactly"):
            return "exactly", (r.natural(),)
        if r.accept("between"):
            lo = r.natural()
            r.skip_inline()
            r.expect("and")
            return "between", (lo, r.natural())
        r.fail("expected an array cardinality", ("at most", "exactly", "between"))

    def range_(self) -> RangeAst:
        r = self.r
        r.skip_inline()
        opener = r.peek_char()
        closers = {"{": "}", "[": "])", "(": "])"}
        if opener not in closers:
            r.fail("expected a range", ("{...}", "[lo,hi]", "(lo,hi)"))
        start = r.pos
        end = start + 1
        while end < len(r.text) and r.text[end] not in closers[opener] and r.text[end] != "\n":
            end += 1
        if end >= len(r.text) or r.text[end] == "\n":
            r.fail("unterminated range", tuple(closers[opener]), pos=start)
        items = tuple(s.strip() for s in r.text[start + 1:end].split(","))
        if any(not s for s in items):
            r.fail("empty item in range", pos=start)
        r.pos = end + 1
        if opener == "{":
            return RangeAst("set", items)
        if len(items) > 2:
            r.fail("an interval has at most two bounds", pos=start)
        return RangeAst("interval", items, opener == "(", r.text[end] == ")")

    # -- scenarios ------------------------------------------------------------

    def scenario(self) -> ScenarioAst:
        r = self.r
        title = r.rest_of_line().lstrip(":").strip()
        if not title:
            r.fail("scenario title is empty", ("<title>",))
        r.skip_ws()
        given = self.given() if r.accept("Given") else None
        r.skip_ws()
        if r.at("Then"):
            r.fail("a scenario's When block must precede its Then block", ("When",))
        r.expect("When")
        when = [self.step(INPUT)]
        r.skip_ws()
        while r.accept("And"):
            when.append(self.step(INPUT))
            r.skip_ws()
        r.expect("Then")
        then = [self.step(OUTPUT)]
        r.skip_ws()
        while r.accept("And"):
            then.append(self.step(OUTPUT))
            r.skip_ws()
        return ScenarioAst(title, given, tuple(when), tuple(then))

    def given(self) -> GivenAst:
        r = self.r
        r.skip_inline()
        initial = r.accept(INITIAL_STATE, ignore_case=True)
        if initial:
            if not r.at_eol():
                r.skip_inline()
                r.accept("and")
            else:
                save = r.pos
                r.skip_ws()
                if not r.accept("And"):
                    r.pos = save
                    return GivenAst(True, None, (), None)
        r.skip_inline()
        nl = r.text.find("\n", r.pos)
        line_end = len(r.text) if nl < 0 else nl
        line = r.text[r.pos:line_end]
        m = re.search(r"[ \t]*such[ \t]+that:[ \t]*$", line)
        prose = line[:m.start()] if m else line
        description = _norm(prose) or None
        referenced = tuple(re.findall(r'"([^"\n]*)"', prose))
        if prose.count('"') % 2:
            r.fail("unbalanced quote in Given description")
        if not initial and description is None and not m:
            r.fail("empty Given", (INITIAL_STATE, "<description>"))
        r.pos = line_end
        guard = self.guard_block() if m else None
        return GivenAst(initial, description, referenced, guard)

    def step(self, direction: str) -> StepAst:
        r = self.r
        r.skip_inline()
        action, params = self.action_and_params()
        if not params:
            return StepAst(action, (), None, direction)
        r.skip_inline()
        if r.accept("such that:"):
            return StepAst(action, params, self.guard_block(), direction)
        if len(params) == 1:
            r.accept("is")
            r.skip_inline()
            if self._at_operator():
                guard = self.prim_guard()
                block = GuardBlockAst(((VarRefAst(params[0]), guard),), ())
                return StepAst(action, params, block, direction)
        r.fail("step parameters must be followed by a guard", ("such that:",) + tuple(p for p, _ in OPERATORS))

    def action_and_params(self) -> tuple[str, tuple[str, ...]]:
        r = self.r
        start = r.pos
        while r.pos < len(r.text) and r.text[r.pos] not in '"\n':
            r.pos += 1
        action = _norm(r.text[start:r.pos])
        if not action:
            r.fail("missing action text", ("<action>",), pos=start)
        params: tuple[str, ...] = ()
        if r.peek_char() == '"':
            params = r.quoted_list()
            if len(set(params)) != len(params):
                r.fail("a step lists the same variable twice", pos=start)
        return action, params

    # -- guards ---------------------------------------------------------------

    def _at_operator(self) -> bool:
        return any(self.r.at(p) for p, _ in OPERATORS)

    def _at_connective(self) -> Optional[str]:
        for c in ("AND", "OR"):
            if self.r.at(c):
                return c
        return None

    def var_ref(self) -> VarRefAst:
        r = self.r
        stored = r.accept("stored")
        r.skip_inline()
        return VarRefAst(r.quoted(), stored)

    def guard_block(self) -> GuardBlockAst:
        r = self.r
        r.skip_ws()
        clauses = [(self.var_ref(), self.guard())]
        connectives = []
        while True:
            save = r.pos
            r.skip_ws()
            conn = self._at_connective()
            if conn is None:
                r.pos = save
                break
            r.accept(conn)
            r.skip_ws()
            connectives.append(conn)
            clauses.append((self.var_ref(), self.guard()))
        return GuardBlockAst(tuple(clauses), tuple(connectives))

    def guard(self):
        r = self.r
        r.skip_inline()
        if r.accept("has attributes such that:"):
            return self.struct_guard()
        if r.accept("has"):
            r.skip_inline()
            if r.accept("all"):
                quantifier, count = "all", None
            else:
                for quantifier in QUANTIFIERS:
                    if r.accept(quantifier):
                        break
                else:
                    r.fail("expected a quantifier", ("all",) + QUANTIFIERS)
                count = r.natural()
            r.skip_inline()
            r.expect("elements where each element")
            return ArrayGuardAst(quantifier, count, self.guard())
        if r.accept("is"):
            r.skip_inline()
        if not self._at_operator():
            r.fail("expected a guard", ("is", "has", "has attributes such that:"))
        return self.prim_guard()

    def struct_guard(self) -> StructGuardAst:
        r = self.r
        r.skip_ws()
        clauses = [(r.quoted(), self.guard())]
        connectives = []
        while True:
            save = r.pos
            r.skip_ws()
            conn = self._at_connective()
            if conn is None:
                r.pos = save
                break
            r.accept(conn)
            r.skip_ws()
            if not self._continues_struct():
                r.pos = save
                break
            connectives.append(conn)
            clauses.append((r.quoted(), self.guard()))
        return StructGuardAst(tuple(clauses), tuple(connectives))

    def _continues_struct(self) -> bool:
        """After a connective: does the next clause name an attribute (vs. a variable)?"""
        r = self.r
        if r.peek_char() != '"':
            return False
        if self.symbols is None:
            return True
        save = r.pos
        ident = r.quoted()
        r.pos = save
        return ident in self.symbols.attr_ids and ident not in self.symbols.var_ids

    def prim_guard(self) -> PrimGuardAst:
        r = self.r
        for phrase, op in OPERATORS:
            if r.accept(phrase):
                break
        else:
            r.fail("expected an operator", tuple(p for p, _ in OPERATORS))
        r.skip_inline()
        if op == "between":
            lo = self.operand(stop=_BETWEEN_AND)
            r.skip_inline()
            r.expect("and")
            r.skip_inline()
            return PrimGuardAst(op, lo, self.operand())
        if r.peek_char() in "{[(":
            return PrimGuardAst(op, self.range_())
        return PrimGuardAst(op, self.operand())

    def operand(self, stop: Optional[re.Pattern] = None):
        r = self.r
        r.skip_inline()
        c = r.peek_char()
        if c == '"' or r.at("stored"):
            return self.var_ref()
        if c == "'":
            return LiteralAst(r.quoted_string("'"), True)
        nl = r.text.find("\n", r.pos)
        line_end = len(r.text) if nl < 0 else nl
        end = line_end
        for pattern in (_CONNECTIVE, stop):
            if pattern is not None:
                m = pattern.search(r.text, r.pos, line_end)
                if m and m.start() < end:
                    end = m.start()
        text = r.text[r.pos:end].strip()
        if not text:
            r.fail("expected a value", ("<value>",))
        r.pos = end
        return LiteralAst(text)

    # -- test cases -----------------------------------------------------------

    def testcase(self) -> TestCaseAst:
        r = self.r
        r.skip_ws()
        r.expect(TEST_GIVEN)
        given_values = self.value_defs()
        if not given_values:
            r.fail("the initial Given needs at least one value definition", ('"<VarID>": <value>',))
        blocks = []
        r.skip_ws()
        while not r.at_eof():
            if r.accept("When"):
                steps = [self.test_in_step()]
                r.skip_ws()
                while r.accept("And"):
                    steps.append(self.test_in_step())
                    r.skip_ws()
                blocks.append(TestWhenAst(tuple(steps)))
            elif r.accept("Then"):
                steps = [self.step(OUTPUT)]
                r.skip_ws()
                while r.accept("And"):
                    steps.append(self.step(OUTPUT))
                    r.skip_ws()
                blocks.append(ThenAst(tuple(steps)))
            else:
                r.fail("unexpected text in test case", ("When", "Then"))
            r.skip_ws()
        if not blocks:
            r.fail("a test case needs at least one step", ("When", "Then"))
        return TestCaseAst(tuple(given_values), tuple(blocks))

    def test_in_step(self) -> TestInStepAst:
        r = self.r
        r.skip_inline()
        action, params = self.action_and_params()
        if not params:
            return TestInStepAst(action, (), ())
        r.skip_inline()
        r.expect("with values:")
        values = self.value_defs()
        if [v.var_id for v in values] != list(params):
            r.fail(f"value definitions {[v.var_id for v in values]} do not match step parameters {list(params)}")
        return TestInStepAst(action, params, tuple(values))

    def value_defs(self) -> list[ValueDefAst]:
        r = self.r
        out = []
        while True:
            save = r.pos
            r.skip_ws()
            if r.peek_char() != '"':
                r.pos = save
                return out
            var_id = r.quoted()
            r.skip_inline()
            r.expect(":")
            out.append(ValueDefAst(var_id, self.value(top=True)))

    def value(self, top: bool = False, terminators: str = ""):
        r = self.r
        r.skip_inline()
        if top and r.at_eol():
            entries = []
            while True:
                save = r.pos
                r.skip_ws()
                m = _INDEX.match(r.text, r.pos)
                if not m:
                    r.pos = save
                    break
                r.pos = m.end()
                entries.append((int(m.group(1)), self.value()))
            if not entries:
                r.fail("expected a value", ("<value>", "1: <value>"))
            return IndexedValueAst(tuple(entries))
        c = r.peek_char()
        if c == "{":
            r.pos += 1
            pairs = []
            r.skip_ws()
            if r.peek_char() != "}":
                while True:
                    r.skip_ws()
                    key = r.quoted()
                    r.skip_inline()
                    r.expect(":")
                    pairs.append((key, self.value(terminators=",}")))
                    r.skip_ws()
                    if r.peek_char() == ",":
                        r.pos += 1
                        continue
                    break
            r.skip_ws()
            r.expect("}")
            return StructValueAst(tuple(pairs))
        if c == "[":
            r.pos += 1
            entries = []
            r.skip_ws()
            if r.peek_char() != "]":
                while True:
                    r.skip_ws()
                    m = _INDEX.match(r.text, r.pos)
                    if not m:
                        r.fail("expected an indexed entry", ("1: <value>",))
                    r.pos = m.end()
                    entries.append((int(m.group(1)), self.value(terminators=",]")))
                    r.skip_ws()
                    if r.peek_char() == ",":
                        r.pos += 1
                        continue
                    break
            r.skip_ws()
            r.expect("]")
            return IndexedValueAst(tuple(entries))
        if c == '"':
            return ScalarValueAst(r.quoted_string('"'), True)
        start = r.pos
        while r.pos < len(r.text) and r.text[r.pos] not in "\r\n" + terminators:
            r.pos += 1
        text = r.text[start:r.pos].strip()
        if not text:
            r.fail("expected a value", ("<value>",), pos=start)
        return ScalarValueAst(text)


def _attr_ids(type_descs) -> Iterable[str]:
    for td in type_descs:
        if isinstance(td, StructTypeAst):
            yield from td.attributes
            yield from _attr_ids(d for _, d in td.descriptions)
        elif isinstance(td, ArrayTypeAst):
            yield from _attr_ids([td.element])


def _guard_var_refs(block: Optional[GuardBlockAst]) -> Iterable[str]:
    if block is None:
        return
    for ref, guard in block.clauses:
        yield ref.var_id
        yield from _inner_var_refs(guard)


def _inner_var_refs(guard) -> Iterable[str]:
    if isinstance(guard, PrimGuardAst):
        for operand in (guard.rhs, guard.upper):
            if isinstance(operand, VarRefAst):
                yield operand.var_id
    elif isinstance(guard, ArrayGuardAst):
        yield from _inner_var_refs(guard.element)
    elif isinstance(guard, StructGuardAst):
        for _, g in guard.clauses:
            yield from _inner_var_refs(g)


def _check_suite(suite: SpecSuiteAst, decls, scenarios, r: _Reader):
    def fail(message, pos):
        line, col = r.location(pos)
        raise PicklesSemanticError(message, line, col, (), r.filename)

    seen = set()
    for pos, d in decls:
        if d.var_id in seen:
            fail(f"variable {d.var_id!r} declared twice", pos)
        seen.add(d.var_id)
    attrs = set(_attr_ids(d.type_desc for _, d in decls))
    for pos, d in decls:
        if d.var_id in attrs:
            fail(f"variable {d.var_id!r} has the same identifier as a structure attribute", pos)
    titles = set()
    for pos, sc in scenarios:
        if sc.title in titles:
            fail(f"duplicate scenario title {sc.title!r}", pos)
        titles.add(sc.title)
        used = []
        if sc.given is not None:
            used += _guard_var_refs(sc.given.guard)
            if sc.given.guard is not None:
                used += sc.given.referenced_vars
        for step in sc.when + sc.then:
            used += step.params
            used += _guard_var_refs(step.guard)
        for var_id in used:
            if var_id not in seen:
                fail(f"undeclared variable {var_id!r} in scenario {sc.title!r}", pos)


def parse_spec(text: str, filename: str = "<text>") -> SpecSuiteAst:
    """Parse a specification suite; raises :class:`PicklesError` subclasses."""
    return _Parser(text, filename).suite()


def parse_testcase(text: str, filename: str = "<text>",
                   suite: Optional[SpecSuiteAst] = None) -> TestCaseAst:
    """Parse a rendered test case.

    With ``suite`` given, every value definition must name a declared
    variable and guard parsing uses the suite's identifiers to decide where
    nested attribute clauses end.
    """
    symbols = None
    if suite is not None:
        symbols = _Symbols(frozenset(d.var_id for d in suite.variables),
                           frozenset(_attr_ids(d.type_desc for d in suite.variables)))
    ast = _Parser(text, filename, symbols).testcase()
    if suite is not None:
        declared = {d.var_id for d in suite.variables}
        defs = list(ast.given_values)
        for block in ast.blocks:
            if isinstance(block, TestWhenAst):
                for step in block.steps:
                    defs += step.values
        for vd in defs:
            if vd.var_id not in declared:
                raise PicklesSemanticError(f"value definition for undeclared variable {vd.var_id!r}",
                                           filename=filename)
    return ast
