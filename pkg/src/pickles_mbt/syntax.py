"""Syntax trees for Pickles specification suites and test cases.

Literal values stay textual here; typing happens against the variable
settings during translation (see :mod:`pickles_mbt.translate`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

INPUT = "input"
OUTPUT = "output"


# -- type descriptions ------------------------------------------------------


@dataclass(frozen=True)
class RangeAst:
    """``{a, b, c}`` (kind ``"set"``) or ``[lo,hi]`` / ``(lo,hi)`` (kind ``"interval"``).

    A one-item interval such as ``[1]`` denotes a singleton.
    """

    kind: str
    items: tuple[str, ...]
    lo_open: bool = False
    hi_open: bool = False


@dataclass(frozen=True)
class PrimTypeAst:
    kind: str
    range: RangeAst


@dataclass(frozen=True)
class ArrayTypeAst:
    mode: str  # "at most" | "exactly" | "between"
    bounds: tuple[int, ...]
    element: "TypeDescAst"


@dataclass(frozen=True)
class StructTypeAst:
    attributes: tuple[str, ...]
    descriptions: tuple[tuple[str, "TypeDescAst"], ...]


TypeDescAst = Union[PrimTypeAst, ArrayTypeAst, StructTypeAst]


@dataclass(frozen=True)
class VarDeclAst:
    var_id: str
    type_desc: TypeDescAst


# -- guards -----------------------------------------------------------------


@dataclass(frozen=True)
class VarRefAst:
    var_id: str
    stored: bool = False


@dataclass(frozen=True)
class LiteralAst:
    text: str
    quoted: bool = False


@dataclass(frozen=True)
class PrimGuardAst:
    op: str  # = != < <= > >= between
    rhs: Union[LiteralAst, VarRefAst, RangeAst]
    upper: Optional[Union[LiteralAst, VarRefAst]] = None  # second operand of "between"


@dataclass(frozen=True)
class ArrayGuardAst:
    quantifier: str  # "at least" | "at most" | "exactly" | "all"
    count: Optional[int]
    element: "GuardAst"


@dataclass(frozen=True)
class StructGuardAst:
    clauses: tuple[tuple[str, "GuardAst"], ...]
    connectives: tuple[str, ...]


GuardAst = Union[PrimGuardAst, ArrayGuardAst, StructGuardAst]


@dataclass(frozen=True)
class GuardBlockAst:
    clauses: tuple[tuple[VarRefAst, GuardAst], ...]
    connectives: tuple[str, ...]

    def __post_init__(self):
        if len(self.connectives) != len(self.clauses) - 1:
            raise ValueError("connective count must be clause count - 1")


# -- scenarios --------------------------------------------------------------


@dataclass(frozen=True)
class StepAst:
    action: str
    params: tuple[str, ...]
    guard: Optional[GuardBlockAst]
    direction: str


@dataclass(frozen=True)
class GivenAst:
    initial: bool
    description: Optional[str]
    referenced_vars: tuple[str, ...]
    guard: Optional[GuardBlockAst]


@dataclass(frozen=True)
class ScenarioAst:
    title: str
    given: Optional[GivenAst]
    when: tuple[StepAst, ...]
    then: tuple[StepAst, ...]


@dataclass(frozen=True)
class SpecSuiteAst:
    variables: tuple[VarDeclAst, ...]
    scenarios: tuple[ScenarioAst, ...]

    def declaration(self, var_id: str) -> VarDeclAst:
        for d in self.variables:
            if d.var_id == var_id:
                return d
        raise KeyError(var_id)


# -- test cases -------------------------------------------------------------


@dataclass(frozen=True)
class ScalarValueAst:
    text: str
    quoted: bool = False


@dataclass(frozen=True)
class IndexedValueAst:
    entries: tuple[tuple[int, "ValueAst"], ...]


@dataclass(frozen=True)
class StructValueAst:
    pairs: tuple[tuple[str, "ValueAst"], ...]


ValueAst = Union[ScalarValueAst, IndexedValueAst, StructValueAst]


@dataclass(frozen=True)
class ValueDefAst:
    var_id: str
    value: ValueAst


@dataclass(frozen=True)
class TestInStepAst:
    __test__ = False  # keep pytest from collecting it

    action: str
    params: tuple[str, ...]
    values: tuple[ValueDefAst, ...]


@dataclass(frozen=True)
class TestWhenAst:
    __test__ = False  # keep pytest from collecting it

    steps: tuple[TestInStepAst, ...]


@dataclass(frozen=True)
class ThenAst:
    steps: tuple[StepAst, ...]


@dataclass(frozen=True)
class TestCaseAst:
    __test__ = False  # keep pytest from collecting it

    given_values: tuple[ValueDefAst, ...]
    blocks: tuple[Union[TestWhenAst, ThenAst], ...]
