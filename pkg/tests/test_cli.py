from __future__ import annotations

import json
from pathlib import Path

import pytest

from pickles_mbt import case_study_text
from pickles_mbt.cli import main
from pickles_mbt.io_json import export_sts, export_tests, import_sts, import_tests

from pickles_mbt.sts import Compare, Const, Param

from models import CTX, make_sts

SAMPLES = {"faulty detectors.length position": ["1.001", "1.6", "1.9", "2.999"]}
FIXED = {"availability": "AV", "enabledness": True, "critical section lane": 1,
         "critical section start": "1.5", "critical section end": "2.0"}


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    (d / "traffic.pickles").write_text(case_study_text())
    (d / "samples.json").write_text(json.dumps(SAMPLES))
    (d / "fixed.json").write_text(json.dumps(FIXED))
    assert main(["translate-spec", str(d / "traffic.pickles"), "--out", str(d / "traffic.json"),
                 "--per-scenario", str(d / "scenarios"), "--report", str(d / "report.json")]) == 0
    assert main(["generate", str(d / "traffic.json"), "--out", str(d / "tests.json")]) == 0
    return d


def test_translate_spec_outputs(workdir, capsys):
    model, _ = import_sts((workdir / "traffic.json").read_bytes())
    assert 26 <= len(model.switches) <= 28
    assert sorted(p.name for p in (workdir / "scenarios").iterdir()) == [f"scenario_{i}.json" for i in range(1, 5)]
    report = json.loads((workdir / "report.json").read_text())
    assert report["kept"] == len(model.switches)
    assert any(r["scenario"].startswith("04") for r in report["removed"])


def test_translate_spec_prints_report(tmp_path, capsys):
    spec = tmp_path / "t.pickles"
    spec.write_text(case_study_text())
    assert main(["translate-spec", str(spec), "--out", str(tmp_path / "m.json")]) == 0
    err = capsys.readouterr().err
    assert "48 switches before pruning" in err and "removed" in err


def test_depth_two(tmp_path, capsys):
    spec = tmp_path / "t.pickles"
    spec.write_text(case_study_text())
    assert main(["translate-spec", str(spec), "--depth", "2", "--out", str(tmp_path / "m.json")]) == 0
    assert "master model: 28 switches before pruning" in capsys.readouterr().err
    model, _ = import_sts((tmp_path / "m.json").read_bytes())
    # glued inputs: four after Scenario 01, one after 02, one after 03, none after 04;
    # the four output switches of the second copy are shared by the glued inputs
    assert len(model.switches) == 8 + (4 + 1 + 1) + 4


def test_undeclared_variable(tmp_path, capsys):
    bad = tmp_path / "bad.pickles"
    bad.write_text('Variable Settings\n"a" is a boolean with range {true, false}\n'
                   'Scenario: x\nWhen go "b" is equal to true\nThen stop\n')
    assert main(["translate-spec", str(bad)]) == 1
    assert "error: " in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    assert main(["translate-spec", str(tmp_path / "none.pickles")]) == 1


def test_generate_is_deterministic(workdir, tmp_path):
    assert main(["generate", str(workdir / "traffic.json"), "--out", str(tmp_path / "again.json")]) == 0
    assert (tmp_path / "again.json").read_bytes() == (workdir / "tests.json").read_bytes()
    model, ctx = import_sts((workdir / "traffic.json").read_bytes())
    assert len(import_tests((workdir / "tests.json").read_bytes(), model, ctx)) >= 7


def test_generate_reports_coverage(workdir, capsys):
    assert main(["generate", str(workdir / "traffic.json"), "--out", "-"]) == 0
    out = capsys.readouterr()
    assert json.loads(out.out)["kind"] == "tests"
    assert "switch coverage" in out.err


def test_generate_on_empty_model(tmp_path, capsys):
    dead = make_sts("d", 2, [(0, 1)], {0: Compare("<", Param("x"), Const(0))})
    empty = dead.with_switches(())
    (tmp_path / "m.json").write_bytes(export_sts(empty, CTX))
    assert main(["generate", str(tmp_path / "m.json"), "--out", str(tmp_path / "t.json")]) == 0
    assert json.loads((tmp_path / "t.json").read_text())["tests"] == []
    assert "warning" in capsys.readouterr().err


def test_render_and_run(workdir, tmp_path, capsys):
    out = tmp_path / "rendered"
    assert main(["render-tests", str(workdir / "traffic.json"), str(workdir / "tests.json"),
                 "--out", str(out), "--suite-name", "traffic"]) == 0
    files = sorted(out.iterdir())
    assert files[0].name == "traffic_test_1.pickles"
    assert main(["run", str(workdir / "traffic.json"), str(out), "--spec", str(workdir / "traffic.pickles")]) == 0
    assert f"{len(files)}/{len(files)} passed" in capsys.readouterr().out
    for k in range(1, 5):
        assert main(["run", str(workdir / "traffic.json"), str(out), "--mutant", str(k)]) == 1


def test_render_empty_suite(workdir, tmp_path):
    (tmp_path / "none.json").write_bytes(export_tests([]))
    out = tmp_path / "rendered"
    assert main(["render-tests", str(workdir / "traffic.json"), str(tmp_path / "none.json"), "--out", str(out)]) == 0
    assert list(out.iterdir()) == []


def test_render_missing_annotation(workdir, tmp_path, capsys):
    doc = json.loads((workdir / "traffic.json").read_text())
    doc["annotations"].pop("i1")
    (tmp_path / "m.json").write_text(json.dumps(doc))
    assert main(["render-tests", str(tmp_path / "m.json"), str(workdir / "tests.json"),
                 "--out", str(tmp_path / "r")]) == 1
    assert "i1" in capsys.readouterr().err


@pytest.mark.parametrize("scenario,expected", [(1, 175), (2, 112), (3, 11)])
def test_count_inputs(workdir, capsys, scenario, expected):
    scenario_model = workdir / "scenarios" / f"scenario_{scenario}.json"
    model, _ = import_sts(scenario_model.read_bytes())
    switch = model.switches[0].id
    assert main(["count-inputs", str(scenario_model), switch, str(workdir / "fixed.json"),
                 "--samples", str(workdir / "samples.json")]) == 0
    assert capsys.readouterr().out.strip() == str(expected)


def test_count_inputs_on_master(workdir, capsys):
    for switch, expected in [("r_0_1", 175), ("r_0_2", 112), ("r_0_3", 11)]:
        assert main(["count-inputs", str(workdir / "traffic.json"), switch, str(workdir / "fixed.json"),
                     "--samples", str(workdir / "samples.json")]) == 0
        assert capsys.readouterr().out.strip() == str(expected)


def test_count_inputs_unknown_switch(workdir, capsys):
    assert main(["count-inputs", str(workdir / "traffic.json"), "r_99", str(workdir / "fixed.json")]) == 1


def test_run_reference_test(workdir, capsys):
    reference_test = Path(__file__).parent / "data" / "reference_test.pickles"
    assert main(["run", str(workdir / "traffic.json"), str(reference_test)]) == 1
    assert "fail at step 2" in capsys.readouterr().out
