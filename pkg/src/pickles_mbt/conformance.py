"""Running rendered test cases against a system under test.

The adapter contract is deliberately small: reset to an initial valuation,
push an input, wait for the next output. :class:`ReferenceSut` implements
the traffic-availability case study in-process, and :func:`mutant` derives
faulty variants of it, one per output rule.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Mapping, Optional, Protocol, Sequence, Union

from .parser import parse_testcase
from .sts import EvaluationError, LocVar, Param, evaluate
from .syntax import TestCaseAst, TestWhenAst
from .translate import STEP, decode_value, map_guard_block, step_text
from .values import Value

DEFAULT_TIMEOUT = 5.0

GUARD_VIOLATED = "guard-violated"
WRONG_GATE = "wrong-gate"
TIMEOUT = "timeout"


class SutAdapter(Protocol):
    def reset(self, initial: Mapping[str, Value]) -> None:
        """Return to the initial state, seeded with the test's initial valuation."""

    def apply_input(self, action: str, values: Sequence[Value]) -> None:
        ...

    def await_output(self, timeout: float = DEFAULT_TIMEOUT) -> Optional[tuple[str, tuple]]:
        """Next observed output as (action, values), or None on timeout."""


@dataclass(frozen=True)
class Verdict:
    passed: bool
    step: Optional[int] = None
    reason: str = ""
    expected: str = ""
    observed: tuple = ()

    def __str__(self):
        if self.passed:
            return "pass"
        return f"fail at step {self.step}: {self.reason} (expected {self.expected!r}, observed {self.observed!r})"


PASS = Verdict(True)


def run_test(tc: Union[str, TestCaseAst], adapter: SutAdapter, ctx, suite=None,
             timeout: float = DEFAULT_TIMEOUT) -> Verdict:
    """Execute one test case; the first failing Then step decides the verdict."""
    ast = parse_testcase(tc, suite=suite) if isinstance(tc, str) else tc
    types = ctx.var_types()
    state: dict[str, Value] = {}
    for vd in ast.given_values:
        state[vd.var_id] = decode_value(vd.value, types[vd.var_id])
    adapter.reset(dict(state))
    index = 0
    for block in ast.blocks:
        for step in block.steps:
            index += 1
            if isinstance(block, TestWhenAst):
                values = [decode_value(vd.value, types[vd.var_id]) for vd in step.values]
                try:
                    adapter.apply_input(step.action, values)
                except Exception as exc:  # adapter transport failure
                    return Verdict(False, index, TIMEOUT, step.action, (str(exc),))
                state.update(zip(step.params, values))
                continue
            expected = step_text(step)
            try:
                observed = adapter.await_output(timeout)
            except Exception as exc:
                return Verdict(False, index, TIMEOUT, expected, (str(exc),))
            if observed is None:
                return Verdict(False, index, TIMEOUT, expected)
            action, values = observed[0], tuple(observed[1])
            if action != step.action or len(values) != len(step.params):
                return Verdict(False, index, WRONG_GATE, expected, (action,) + values)
            guard = map_guard_block(step.guard, ctx, STEP, step.params)
            valuation: dict = {LocVar(k): v for k, v in state.items()}
            valuation.update({Param(p): v for p, v in zip(step.params, values)})
            try:
                ok = evaluate(guard, valuation) is True
            except EvaluationError:
                ok = False
            if not ok:
                return Verdict(False, index, GUARD_VIOLATED, expected, values)
            state.update(zip(step.params, values))
    return PASS


# -- the case-study reference implementation --------------------------------------

DETECTS = "the controller detects"
ACCESS_LOST = "the controller access is lost"
DISPLAYS = "the user interface displays"
REPORTS = "the user interface reports status"


@dataclass
class ReferenceSut:
    """Road-section availability as specified by the four case-study scenarios."""

    availability: str = "AV"
    enabled: bool = True
    lane: int = 1
    start: Decimal = Decimal("1.5")
    end: Decimal = Decimal("2.5")
    outputs: deque = field(default_factory=deque)

    def reset(self, initial: Mapping[str, Value]) -> None:
        self.availability = initial.get("availability", "AV")
        self.enabled = initial.get("enabledness", True)
        self.lane = initial.get("critical section lane", self.lane)
        self.start = initial.get("critical section start", self.start)
        self.end = initial.get("critical section end", self.end)
        self.outputs.clear()

    def inside(self, detector) -> bool:
        return detector["lane"] == self.lane and self.start < detector["length position"] < self.end

    def classify(self, inside: int) -> str:
        if inside == 0:
            return "AV"
        if inside == 1:
            return "PART AV"
        return "NOT AV"

    def on_access_lost(self) -> bool:
        self.enabled = False
        return self.enabled

    def apply_input(self, action: str, values: Sequence[Value]) -> None:
        if action == DETECTS:
            (detectors,) = values
            self.availability = self.classify(sum(1 for d in detectors if self.inside(d)))
            self.outputs.append((DISPLAYS, (self.availability,)))
        elif action == ACCESS_LOST:
            self.outputs.append((REPORTS, (self.on_access_lost(),)))
        else:
            raise ValueError(f"unknown input {action!r}")

    def await_output(self, timeout: float = DEFAULT_TIMEOUT) -> Optional[tuple[str, tuple]]:
        return self.outputs.popleft() if self.outputs else None


class _WrongClassification(ReferenceSut):
    def __init__(self, inside_case: int, report: str):
        super().__init__()
        self.inside_case = inside_case
        self.report = report

    def classify(self, inside: int) -> str:
        if min(inside, 2) == self.inside_case:
            return self.report
        return super().classify(inside)


class _KeepsEnabled(ReferenceSut):
    def on_access_lost(self) -> bool:
        return True


MUTANTS = {
    1: "no detector inside reported as PART AV",
    2: "one detector inside reported as AV",
    3: "two or more detectors inside reported as AV",
    4: "lost access still reports enabled",
}


def mutant(k: int) -> ReferenceSut:
    if k == 1:
        return _WrongClassification(0, "PART AV")
    if k == 2:
        return _WrongClassification(1, "AV")
    if k == 3:
        return _WrongClassification(2, "AV")
    if k == 4:
        return _KeepsEnabled()
    raise ValueError(f"no mutant {k}")


def mutation_score(tests: Sequence[Union[str, TestCaseAst]], ctx, suite=None) -> dict[int, bool]:
    """Which mutants are killed (fail at least one test)."""
    killed = {}
    for k in MUTANTS:
        sut = mutant(k)
        killed[k] = any(not run_test(t, sut, ctx, suite).passed for t in tests)
    return killed

