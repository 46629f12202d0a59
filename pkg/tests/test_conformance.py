from __future__ import annotations

from collections import deque

import pytest

from pickles_mbt.conformance import (
    GUARD_VIOLATED,
    PASS,
    TIMEOUT,
    WRONG_GATE,
    ReferenceSut,
    mutant,
    mutation_score,
    run_test,
)
from pickles_mbt.parser import parse_spec
from pickles_mbt.render import render_test
from pickles_mbt.sts import evaluate
from pickles_mbt.symbolic import Solution, path_condition
from pickles_mbt.testgen import path_of
from pickles_mbt.translate import translate_suite

RANGE_SUITE = """Variable Settings
"x" is an integer with range [0,9]
"y" is an integer with range [0,9]
Scenario: echo
When the value is sent "x" is equal to 5
Then the value is reported "y" such that:
  "y" is equal to [2,4]
"""

RANGE_TEST = """Given the system is initialized with values:
    "x": 0
    "y": 0
When the value is sent "x" with values:
    "x": 5
Then the value is reported "y" such that:
    "y" is equal to [2,4]
"""


class Scripted:
    """Adapter replaying a fixed list of outputs; ``None`` entries mean silence."""

    def __init__(self, outputs):
        self.outputs = deque(outputs)
        self.inputs = []

    def reset(self, initial):
        self.inputs.clear()

    def apply_input(self, action, values):
        self.inputs.append((action, tuple(values)))

    def await_output(self, timeout=5.0):
        return self.outputs.popleft() if self.outputs else None


@pytest.fixture(scope="module")
def range_ctx():
    return translate_suite(parse_spec(RANGE_SUITE)).context


def corrected_reference_test(reference_test_text):
    """The reference test case with input positions that put two detectors inside (2.0, 2.5)."""
    return (reference_test_text
            .replace('"length position": 2.0}', '"length position": 2.1}')
            .replace('"length position": 2.8}', '"length position": 2.3}'))


def test_generated_suite_passes_reference(generated, pruned, ctx, suite):
    for tc in generated:
        assert run_test(render_test(tc, pruned, ctx), ReferenceSut(), ctx, suite) == PASS


def test_every_mutant_is_killed(generated, pruned, ctx, suite):
    texts = [render_test(tc, pruned, ctx) for tc in generated]
    assert mutation_score(texts, ctx, suite) == {1: True, 2: True, 3: True, 4: True}


def test_reference_test_as_printed_fails_at_the_first_then(reference_test_text, ctx, suite):
    verdict = run_test(reference_test_text, ReferenceSut(), ctx, suite)
    assert not verdict.passed
    assert (verdict.step, verdict.reason, verdict.observed) == (2, GUARD_VIOLATED, ("PART AV",))


def test_corrected_reference_test_passes(reference_test_text, ctx, suite):
    assert run_test(corrected_reference_test(reference_test_text), ReferenceSut(), ctx, suite) == PASS


def test_mutant_reporting_av_fails_first_then(reference_test_text, ctx, suite):
    verdict = run_test(corrected_reference_test(reference_test_text), mutant(3), ctx, suite)
    assert (verdict.passed, verdict.step, verdict.observed) == (False, 2, ("AV",))


def test_range_guard_passes(range_ctx):
    adapter = Scripted([("the value is reported", (3,))])
    assert run_test(RANGE_TEST, adapter, range_ctx) == PASS
    assert adapter.inputs == [("the value is sent", (5,))]


def test_range_guard_violation(range_ctx):
    verdict = run_test(RANGE_TEST, Scripted([("the value is reported", (7,))]), range_ctx)
    assert (verdict.reason, verdict.step) == (GUARD_VIOLATED, 2)


def test_wrong_gate(range_ctx):
    verdict = run_test(RANGE_TEST, Scripted([("something else", (3,))]), range_ctx)
    assert verdict.reason == WRONG_GATE


def test_silence_is_a_timeout(range_ctx):
    verdict = run_test(RANGE_TEST, Scripted([]), range_ctx)
    assert verdict.reason == TIMEOUT and verdict.step == 2


def test_transport_failure_is_a_timeout(range_ctx):
    class Broken(Scripted):
        def apply_input(self, action, values):
            raise ConnectionError("link down")

    verdict = run_test(RANGE_TEST, Broken([]), range_ctx)
    assert (verdict.reason, verdict.step) == (TIMEOUT, 1)


def test_verdict_text():
    assert str(PASS) == "pass"


def test_final_state_matches_symbolic_replay(generated, pruned, ctx, suite):
    for tc in generated:
        sut = ReferenceSut()
        assert run_test(render_test(tc, pruned, ctx), sut, ctx, suite).passed
        path = path_of(tc, pruned)
        sp = path_condition(path, list(ctx.bindings))
        valuation = Solution(tc.ini, tc.values).valuation(path)
        final = {k: evaluate(t, valuation) for k, t in sp.final_state}
        assert (sut.availability, sut.enabled) == (final["availability"], final["enabledness"])


def test_unknown_mutant():
    with pytest.raises(ValueError):
        mutant(9)
