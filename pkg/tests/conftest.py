from __future__ import annotations

from decimal import Decimal
from pathlib import Path

import pytest

from pickles_mbt.compose import master, prune
from pickles_mbt.parser import parse_spec
from pickles_mbt.testgen import FormalTestCase, find_path, generate_switch_coverage
from pickles_mbt.translate import translate_suite
from pickles_mbt.values import Struct

DATA = Path(__file__).parent / "data"


def detector(lane, lp) -> Struct:
    return Struct({"lane": lane, "length position": Decimal(str(lp))})


@pytest.fixture(scope="session")
def case_study_text() -> str:
    return (DATA / "case_study.pickles").read_text()


@pytest.fixture(scope="session")
def reference_test_text() -> str:
    return (DATA / "reference_test.pickles").read_text()


@pytest.fixture(scope="session")
def suite(case_study_text):
    return parse_spec(case_study_text)


@pytest.fixture(scope="session")
def translated(suite):
    return translate_suite(suite)


@pytest.fixture(scope="session")
def ctx(translated):
    return translated.context


@pytest.fixture(scope="session")
def master_model(translated):
    return master(translated.primary, translated.all)


@pytest.fixture(scope="session")
def pruned_and_report(master_model, ctx):
    return prune(master_model, ctx)


@pytest.fixture(scope="session")
def pruned(pruned_and_report):
    return pruned_and_report[0]


@pytest.fixture(scope="session")
def generated(pruned, ctx):
    return generate_switch_coverage(pruned, ctx)


@pytest.fixture(scope="session")
def worked_test(pruned):
    """The worked formal test: Scenario 03 followed by Scenario 04, values as in the reference test case."""
    path = find_path(pruned, ["03", "04"])
    ini = {
        "availability": "AV",
        "enabledness": True,
        "faulty detectors": (detector(1, "1.5"),) * 3,
        "critical section lane": 1,
        "critical section start": Decimal("2.0"),
        "critical section end": Decimal("2.5"),
    }
    values = (
        ((detector(1, "2.0"), detector(1, "2.8"), detector(1, "2.2")),),
        ("NOT AV",),
        (),
        (False,),
    )
    return FormalTestCase(tuple(r.id for r in path), ini, values)


ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record the outcome of one acceptance criterion for the end-of-run summary."""
    results = request.config.stash.setdefault(ACCEPTANCE, {})

    def record(number: int, ok: bool, detail: str):
        results[number] = (ok, detail)
        assert ok, f"criterion {number}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, detail = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
